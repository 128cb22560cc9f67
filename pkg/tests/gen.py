"""Shared random-instance generators for the test suite."""

from __future__ import annotations

import numpy as np

from folkwalk.dataset import Post, TaggingDataset, build_matrices


def random_posts(
    rng: np.random.Generator,
    n_users: int = 8,
    n_items: int = 10,
    n_tags: int = 5,
    items_per_user: tuple[int, int] = (2, 5),
    tags_per_save: tuple[int, int] = (1, 3),
) -> list[Post]:
    """Posts where every user saves and tags something; item/tag coverage is
    not guaranteed (use :func:`random_dataset` for post-filter-like data)."""
    posts = []
    for u in range(n_users):
        k = rng.integers(items_per_user[0], items_per_user[1] + 1)
        for i in rng.choice(n_items, size=min(k, n_items), replace=False):
            nt = rng.integers(tags_per_save[0], tags_per_save[1] + 1)
            tags = tuple(f"t{t}" for t in rng.choice(n_tags, size=nt))
            posts.append(Post(f"u{u}", f"i{i}", tags))
    return posts


def random_dataset(
    rng: np.random.Generator,
    n_users: int = 8,
    n_items: int = 10,
    n_tags: int = 5,
    **kwargs,
) -> TaggingDataset:
    """Dataset where every user has >= 1 item and tag, and every item has
    >= 1 user and tag (the shape the density filter guarantees)."""
    posts = random_posts(rng, n_users, n_items, n_tags, **kwargs)
    # guarantee item coverage: round-robin a save with a tag onto each item
    for i in range(n_items):
        u = i % n_users
        posts.append(Post(f"u{u}", f"i{i}", (f"t{i % n_tags}",)))
    merged: dict[tuple[str, str], list[str]] = {}
    for p in posts:
        merged.setdefault((p.user, p.item), []).extend(p.tags)
    flat = [Post(u, i, tuple(t)) for (u, i), t in merged.items()]
    return build_matrices(flat)


def slow_mix_dataset(rng: np.random.Generator) -> TaggingDataset:
    """Dense save clusters joined by one bridge user: the similarity matrices
    mix slowly (second eigenvalue near 1), so the walk's successive-change
    ratio settles at the damping factor within a few iterations."""
    n_clusters = int(rng.integers(2, 4))
    posts = []
    for c in range(n_clusters):
        users = int(rng.integers(4, 8))
        items = int(rng.integers(5, 9))
        for u in range(users):
            for i in range(items):
                posts.append(Post(f"u{c}_{u}", f"i{c}_{i}", (f"t{c}",)))
    for c in range(n_clusters):
        for i in range(int(rng.integers(2, 4))):
            posts.append(Post("bridge", f"i{c}_{i}", (f"t{c}",)))
    merged: dict[tuple[str, str], list[str]] = {}
    for p in posts:
        merged.setdefault((p.user, p.item), []).extend(p.tags)
    return build_matrices([Post(u, i, tuple(t)) for (u, i), t in merged.items()])


def planted_cluster_posts(
    rng: np.random.Generator,
    n_user_clusters: int = 5,
    n_item_clusters: int = 5,
    n_users: int = 200,
    n_items: int = 250,
    n_tags: int = 40,
    p_within: float = 0.3,
    p_cross: float = 0.01,
) -> list[Post]:
    """Block-structured corpus: user cluster c saves items of item cluster c
    with probability p_within and others with p_cross; saves carry tags drawn
    from the item cluster's dedicated tag block."""
    tags_per_cluster = n_tags // n_item_clusters
    posts = []
    for u in range(n_users):
        uc = u * n_user_clusters // n_users
        for i in range(n_items):
            ic = i * n_item_clusters // n_items
            p = p_within if uc == ic else p_cross
            if rng.random() < p:
                t = ic * tags_per_cluster + int(rng.integers(tags_per_cluster))
                posts.append(Post(f"u{u}", f"i{i}", (f"t{t}",)))
    return posts
