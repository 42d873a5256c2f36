"""Seeded random instance generators shared by tests and experiment scripts.

Partitioned instances place each agent set in its own cluster around the
vertices of a scaled simplex, which keeps the family well separable by a
wide margin; the property is still verified and resampled on the rare
failure so downstream code can rely on it unconditionally.
"""

from __future__ import annotations

import numpy as np

from .core import DataSet
from .errors import InternalInconsistency
from .separability import AgentPartition, is_well_separable

CLUSTER_GAP = 6.0
CLUSTER_RADIUS = 0.8


def random_data(rng: np.random.Generator, n: int, d: int = 1,
                x_scale: float = 5.0, y_scale: float = 2.0) -> DataSet:
    """Generic admissible data: continuous draws make ties measure-zero."""
    if d == 0:
        xs = np.zeros((n, 0))
    else:
        xs = rng.uniform(-x_scale, x_scale, (n, d))
    return DataSet(xs, rng.normal(0.0, y_scale, n))


def _anchors(d: int) -> np.ndarray:
    out = np.zeros((d + 1, d))
    for t in range(1, d + 1):
        out[t, t - 1] = CLUSTER_GAP
    return out


def random_separable_instance(
    rng: np.random.Generator, d: int, sizes=None, y_scale: float = 2.0,
    ranks: str | tuple = "random",
) -> tuple[DataSet, AgentPartition]:
    """A publicly separable (d+1)-set partition with the requested ranks.

    ``sizes`` gives the per-set agent counts (default: uniform 1..4 each).
    ``ranks`` is "random", "median", or an explicit tuple.
    """
    if sizes is None:
        sizes = tuple(int(rng.integers(1, 5)) for _ in range(d + 1))
    if len(sizes) != d + 1:
        raise ValueError(f"need {d + 1} set sizes, got {len(sizes)}")
    anchors = _anchors(d)
    for _attempt in range(20):
        blocks = [
            anchors[t] + rng.uniform(-CLUSTER_RADIUS, CLUSTER_RADIUS, (sizes[t], d))
            for t in range(d + 1)
        ]
        if d == 0 or is_well_separable(blocks):
            break
    else:
        raise InternalInconsistency("could not sample a well separable family")
    xs = np.concatenate(blocks) if d > 0 else np.zeros((sum(sizes), 0))
    ys = rng.normal(0.0, y_scale, xs.shape[0])
    sets = []
    start = 0
    for size in sizes:
        sets.append(tuple(range(start, start + size)))
        start += size
    if ranks == "random":
        rank_vec = tuple(int(rng.integers(1, size + 1)) for size in sizes)
    elif ranks == "median":
        rank_vec = tuple((size + 1) // 2 for size in sizes)
    else:
        rank_vec = tuple(int(k) for k in ranks)
    return DataSet(xs, ys), AgentPartition(tuple(sets), rank_vec)


def random_split_line_instance(
    rng: np.random.Generator, n_left: int, n_right: int, y_scale: float = 2.0,
) -> tuple[DataSet, tuple[int, ...], tuple[int, ...]]:
    """d = 1 data with an index split separated by a vertical line."""
    xs_left = np.sort(rng.uniform(0.0, 4.0, n_left))
    xs_right = np.sort(rng.uniform(4.0 + CLUSTER_GAP, 8.0 + CLUSTER_GAP, n_right))
    xs = np.concatenate([xs_left, xs_right])[:, None]
    ys = rng.normal(0.0, y_scale, n_left + n_right)
    return DataSet(xs, ys), tuple(range(n_left)), tuple(range(n_left, n_left + n_right))
