"""Mixed Chebyshev metric, kNN radii and radius counts with exact tie semantics.

Per-coordinate distance is ``|a - b|`` for numeric columns and 0/1 for
categorical ones; a point-to-point distance is the maximum over coordinates.
Boundary membership is decided by exact floating-point comparison.

Two interchangeable engines compute the per-row :class:`NeighborProfile`
table. ``"brute"`` evaluates blocks of the full distance matrix and is the
reference. ``"tree"`` queries :class:`scipy.spatial.cKDTree` indexes built
on an isometric embedding (categorical columns expanded to indicator
coordinates) for a candidate superset, then re-checks every candidate with
the same exact arithmetic, so both engines return identical tables.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .data import Dataset, RoleAssignment

_BLOCK_ROWS = 256


class CountMode(enum.Enum):
    INCLUSIVE = "inclusive"  # dist <= r
    STRICT = "strict"  # dist < r


@dataclass(frozen=True)
class NeighborProfile:
    """Radius and counts for one sample point.

    ``rho`` is the joint-space kNN distance. ``tilde_k`` and the ``n_*``
    fields count other points at distance <= rho in the joint, XZ, YZ and Z
    projections. For an MI problem (no Z columns) ``n_z`` is fixed to n.
    """

    rho: float
    tilde_k: int
    n_xz: int
    n_yz: int
    n_z: int


def mixed_distance(ds: Dataset, i: int, j: int) -> float:
    vals = ds.values
    cat = ds.categorical_mask
    best = 0.0
    for c in range(ds.d):
        if cat[c]:
            gap = 0.0 if vals[i, c] == vals[j, c] else 1.0
        else:
            gap = abs(float(vals[i, c]) - float(vals[j, c]))
        if gap > best:
            best = gap
    return best


def _row_distances(ds: Dataset, i: int) -> np.ndarray:
    """Distances from row i to every row (self included, at 0)."""
    return _block_distances(ds.values, ds.categorical_mask, range(ds.d), np.array([i]))[0]


def _block_distances(values, cat_mask, cols, rows) -> np.ndarray:
    out = np.zeros((len(rows), values.shape[0]))
    for c in cols:
        column = values[:, c]
        block = column[rows][:, None]
        if cat_mask[c]:
            gap = (block != column[None, :]).astype(float)
        else:
            gap = np.abs(block - column[None, :])
        np.maximum(out, gap, out=out)
    return out


def knn_radius(ds: Dataset, i: int, k: int) -> float:
    """Distance from row i to its k-th nearest other row (ties counted)."""
    _check_k(ds.n, k)
    dist = np.delete(_row_distances(ds, i), i)
    return float(np.partition(dist, k - 1)[k - 1])


def count_within(ds_sub: Dataset, i: int, r: float, mode: CountMode = CountMode.INCLUSIVE) -> int:
    """Number of rows j != i within distance r of row i."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    dist = np.delete(_row_distances(ds_sub, i), i)
    if mode is CountMode.STRICT:
        return int(np.count_nonzero(dist < r))
    return int(np.count_nonzero(dist <= r))


def _check_k(n: int, k: int) -> None:
    if not (1 <= k <= n - 1):
        raise ValueError(f"k must satisfy 1 <= k <= n-1 (n={n}), got k={k}")


def neighbor_profile(ds: Dataset, roles: RoleAssignment, i: int, k: int) -> NeighborProfile:
    roles.validate(ds)
    joint = ds.project(roles.joint)
    rho = knn_radius(joint, i, k)
    tilde_k = count_within(joint, i, rho)
    n_xz = count_within(ds.project(roles.xz), i, rho)
    n_yz = count_within(ds.project(roles.yz), i, rho)
    n_z = ds.n if roles.is_mi else count_within(ds.project(roles.z_cols), i, rho)
    return NeighborProfile(rho, tilde_k, n_xz, n_yz, n_z)


@dataclass(frozen=True)
class ProfileTable:
    """Column-oriented neighbor profiles for every row.

    Besides the inclusive counts of :class:`NeighborProfile` it carries the
    strict counts (``star_*``: distance < rho) used by the FP and KSG
    estimators. In the MI case ``n_z`` is n and ``star_z`` is n - 1.
    """

    k: int
    rho: np.ndarray
    tilde_k: np.ndarray
    n_xz: np.ndarray
    n_yz: np.ndarray
    n_z: np.ndarray
    star_xz: np.ndarray
    star_yz: np.ndarray
    star_z: np.ndarray

    def __len__(self):
        return len(self.rho)

    def __getitem__(self, i) -> NeighborProfile:
        return NeighborProfile(
            float(self.rho[i]),
            int(self.tilde_k[i]),
            int(self.n_xz[i]),
            int(self.n_yz[i]),
            int(self.n_z[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def equals(self, other: "ProfileTable") -> bool:
        fields = ("rho", "tilde_k", "n_xz", "n_yz", "n_z", "star_xz", "star_yz", "star_z")
        return self.k == other.k and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in fields
        )


def batch_profiles(
    ds: Dataset,
    roles: RoleAssignment,
    k: int,
    method: str = "brute",
    workers: int | None = None,
) -> ProfileTable:
    """Neighbor profiles of all rows.

    Parameters
    ----------
    method : {"brute", "tree"}
        Computation engine; both give bit-identical tables.
    workers : int, optional
        Thread count for the brute-force engine (row blocks run concurrently
        and are reassembled in row order).
    """
    roles.validate(ds)
    _check_k(ds.n, k)
    if method == "brute":
        parts = _brute_parts(ds, roles, k, workers)
    elif method == "tree":
        parts = _tree_parts(ds, roles, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ProfileTable(k, *parts)


def _brute_block(values, cat, roles: RoleAssignment, k: int, rows: np.ndarray):
    n = values.shape[0]
    d_x = _block_distances(values, cat, roles.x_cols, rows)
    d_y = _block_distances(values, cat, roles.y_cols, rows)
    local = np.arange(len(rows))
    if roles.is_mi:
        d_xz, d_yz = d_x, d_y
        d_z = None
    else:
        d_z = _block_distances(values, cat, roles.z_cols, rows)
        d_xz = np.maximum(d_x, d_z)
        d_yz = np.maximum(d_y, d_z)
    d_joint = np.maximum(d_xz, d_y)
    for mat in (d_joint, d_xz, d_yz) + ((d_z,) if d_z is not None else ()):
        mat[local, rows] = np.inf
    rho = np.partition(d_joint, k - 1, axis=1)[:, k - 1]
    r = rho[:, None]

    def inclusive(mat):
        return np.count_nonzero(mat <= r, axis=1)

    def strict(mat):
        return np.count_nonzero(mat < r, axis=1)

    if d_z is None:
        n_z = np.full(len(rows), n)
        star_z = np.full(len(rows), n - 1)
    else:
        n_z, star_z = inclusive(d_z), strict(d_z)
    return (
        rho,
        inclusive(d_joint),
        inclusive(d_xz),
        inclusive(d_yz),
        n_z,
        strict(d_xz),
        strict(d_yz),
        star_z,
    )


def _brute_parts(ds, roles, k, workers):
    values, cat = ds.values, ds.categorical_mask
    blocks = [np.arange(s, min(s + _BLOCK_ROWS, ds.n)) for s in range(0, ds.n, _BLOCK_ROWS)]
    if workers and workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _brute_block(values, cat, roles, k, b), blocks))
    else:
        results = [_brute_block(values, cat, roles, k, b) for b in blocks]
    return [
        np.concatenate([res[f] for res in results]).astype(float if f == 0 else np.int64)
        for f in range(8)
    ]


def _embed(values, cat, cols) -> np.ndarray:
    """Indicator expansion of categorical columns; isometric under l_inf."""
    pieces = []
    for c in cols:
        column = values[:, c]
        if cat[c]:
            levels = np.unique(column)
            pieces.append((column[:, None] == levels[None, :]).astype(float))
        else:
            pieces.append(column[:, None])
    return np.hstack(pieces)


def _inflate(r: np.ndarray) -> np.ndarray:
    # Query radius strictly above r so boundary points are always candidates.
    return np.nextafter(r * (1.0 + 1e-9), np.inf) + 1e-300


def _tree_parts(ds, roles, k):
    values, cat, n = ds.values, ds.categorical_mask, ds.n
    joint_pts = _embed(values, cat, roles.joint)
    joint_tree = cKDTree(joint_pts)
    approx, _ = joint_tree.query(joint_pts, k=k + 1, p=np.inf)
    approx = approx[:, -1]
    radius = _inflate(approx)
    joint_cands = joint_tree.query_ball_point(joint_pts, radius, p=np.inf)

    rho = np.empty(n)
    tilde_k = np.empty(n, dtype=np.int64)
    for i in range(n):
        cand = np.asarray(joint_cands[i], dtype=np.int64)
        cand = cand[cand != i]
        dist = _exact_to(values, cat, roles.joint, i, cand)
        if len(dist) < k:
            raise RuntimeError(f"tree search returned too few candidates for row {i}")
        r_i = np.partition(dist, k - 1)[k - 1]
        rho[i] = r_i
        tilde_k[i] = np.count_nonzero(dist <= r_i)
    radius = _inflate(rho)

    def sub_counts(cols):
        pts = _embed(values, cat, cols)
        tree = cKDTree(pts)
        cands = tree.query_ball_point(pts, radius, p=np.inf)
        inc = np.empty(n, dtype=np.int64)
        st = np.empty(n, dtype=np.int64)
        for i in range(n):
            cand = np.asarray(cands[i], dtype=np.int64)
            cand = cand[cand != i]
            dist = _exact_to(values, cat, cols, i, cand)
            inc[i] = np.count_nonzero(dist <= rho[i])
            st[i] = np.count_nonzero(dist < rho[i])
        return inc, st

    n_xz, star_xz = sub_counts(roles.xz)
    n_yz, star_yz = sub_counts(roles.yz)
    if roles.is_mi:
        n_z = np.full(n, n, dtype=np.int64)
        star_z = np.full(n, n - 1, dtype=np.int64)
    else:
        n_z, star_z = sub_counts(roles.z_cols)
    return [rho, tilde_k, n_xz, n_yz, n_z, star_xz, star_yz, star_z]


def _exact_to(values, cat, cols, i, cand) -> np.ndarray:
    out = np.zeros(len(cand))
    for c in cols:
        column = values[cand, c]
        if cat[c]:
            gap = (values[i, c] != column).astype(float)
        else:
            gap = np.abs(values[i, c] - column)
        np.maximum(out, gap, out=out)
    return out


def chain_ok(profile: NeighborProfile, k: int, n: int, mi: bool = False) -> bool:
    """Whether a profile satisfies k <= k~ <= n_xz, n_yz <= n_z <= n-1."""
    top = n if mi else n - 1
    return (
        k <= profile.tilde_k <= min(profile.n_xz, profile.n_yz)
        and max(profile.n_xz, profile.n_yz) <= profile.n_z <= top
        and profile.rho >= 0
        and not math.isnan(profile.rho)
    )
