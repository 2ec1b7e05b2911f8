"""Fast invariant checks run by ``mixedcmi selftest``.

Checks look up special functions through the :mod:`mixedcmi.numerics` module
at call time so a corrupted implementation is caught.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import numerics
from .data import ColumnKind, Dataset, RoleAssignment
from .estimators import EstimateParams, estimate_cmi_proposed, kl_entropy
from .knn import batch_profiles


def uniform_knn_log_mass(points: np.ndarray, k: int) -> np.ndarray:
    """log of the exact U[0,1]^d mass of each point's l_inf kNN ball."""
    diff = np.abs(points[:, None, :] - points[None, :, :]).max(axis=2)
    np.fill_diagonal(diff, np.inf)
    rho = np.partition(diff, k - 1, axis=1)[:, k - 1]
    lo = np.clip(points - rho[:, None], 0.0, 1.0)
    hi = np.clip(points + rho[:, None], 0.0, 1.0)
    return np.log(hi - lo).sum(axis=1)


def _check_digamma():
    psi = numerics.digamma
    assert abs(psi(1.0) + numerics.EULER_GAMMA) < 1e-12, "psi(1) != -gamma"
    xs = np.linspace(1.0, 1e4, 997)
    gap = psi(xs + 1.0) - psi(xs) - 1.0 / xs
    assert np.max(np.abs(gap)) < 1e-10, "recurrence violated"
    for x in (1.0, 2.0, 5.0, 10.0, 100.0):
        assert abs(psi(x) - math.log(x)) <= 1.0 / x, f"log bound fails at {x}"


def _check_beta_identity():
    rng = np.random.default_rng(11)
    n, k, draws = 200, 3, 60
    vals = [uniform_knn_log_mass(rng.random((n, 2)), k).mean() for _ in range(draws)]
    target = numerics.digamma(float(k)) - numerics.digamma(float(n))
    assert abs(np.mean(vals) - target) < 0.03, f"mean log mass {np.mean(vals):.4f} vs {target:.4f}"


def _random_mixed(rng, n):
    kinds = [ColumnKind.DISCRETE, ColumnKind.CONTINUOUS, ColumnKind.CATEGORICAL, ColumnKind.CONTINUOUS]
    arrays = [
        rng.integers(0, 3, n),
        np.round(rng.normal(size=n), 1),
        rng.choice(list("abc"), n),
        rng.normal(size=n),
    ]
    return Dataset.from_arrays(["a", "b", "c", "d"], kinds, arrays)


def _check_engines():
    rng = np.random.default_rng(5)
    for t in range(20):
        ds = _random_mixed(rng, int(rng.integers(10, 120)))
        roles = RoleAssignment((0,), (1,), (2, 3)) if t % 2 else RoleAssignment((0, 2), (1,))
        k = int(rng.integers(1, 8))
        a = batch_profiles(ds, roles, k, "brute")
        b = batch_profiles(ds, roles, k, "tree")
        assert a.equals(b), f"engines disagree on case {t}"


def _check_plugin():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(20):
        n = int(rng.integers(10, 40))
        cols = [rng.choice(list("pq"), n) for _ in range(3)]
        ds = Dataset.from_arrays(["x", "y", "z"], [ColumnKind.CATEGORICAL] * 3, cols)
        roles = RoleAssignment((0,), (1,), (2,))
        table = batch_profiles(ds, roles, 1)
        if np.any(table.rho != 0):
            continue
        res = estimate_cmi_proposed(ds, roles, EstimateParams(k=1, clamp=False), table)
        rows = [tuple(r) for r in ds.values]
        for i, r in enumerate(rows):
            def dup(sel):
                return sum(1 for j, s in enumerate(rows) if j != i and all(s[c] == r[c] for c in sel))
            kt, nxz, nyz, nz = dup((0, 1, 2)), dup((0, 2)), dup((1, 2)), dup((2,))
            if kt == 1:
                want = numerics.digamma(1.0) - (numerics.digamma(float(nxz)) + numerics.digamma(float(nyz))) + numerics.digamma(float(nz))
            else:
                want = math.log(kt) - (math.log(nxz) + math.log(nyz)) + math.log(nz)
            assert abs(res.xi[i] - want) < 1e-12, f"plug-in mismatch at row {i}"
        checked += 1
    assert checked, "no all-tied categorical sample drawn"


def _check_symmetry_permutation():
    rng = np.random.default_rng(3)
    ds = _random_mixed(rng, 80)
    roles = RoleAssignment((0,), (1,), (2, 3))
    params = EstimateParams(k=4, clamp=False)
    base = estimate_cmi_proposed(ds, roles, params)
    swapped = estimate_cmi_proposed(ds, roles.swapped(), params)
    assert np.array_equal(base.xi, swapped.xi), "X/Y swap changed local values"
    order = rng.permutation(ds.n)
    perm = estimate_cmi_proposed(ds.take_rows(order), roles, params)
    assert np.array_equal(base.xi[order], perm.xi), "row permutation changed local values"


def _check_identical_rows():
    ds = Dataset.from_arrays(["a", "b", "c"], [ColumnKind.CONTINUOUS] * 3, [[1.0] * 6] * 3)
    res = estimate_cmi_proposed(ds, RoleAssignment((0,), (1,), (2,)), EstimateParams(k=2))
    assert res.estimate == 0.0 and np.all(res.xi == 0.0), "identical rows should give 0"


def _check_kl_uniform():
    rng = np.random.default_rng(19)
    vals = []
    for _ in range(10):
        ds = Dataset.from_arrays(["u"], [ColumnKind.CONTINUOUS], [rng.random(1000)])
        vals.append(kl_entropy(ds, EstimateParams(k=7)))
    assert abs(np.mean(vals)) < 0.1, f"KL entropy of U[0,1] = {np.mean(vals):.4f}"


CHECKS: list[tuple[str, Callable[[], None]]] = [
    ("digamma identities", _check_digamma),
    ("kNN ball mass E[log P] = psi(k) - psi(n)", _check_beta_identity),
    ("brute-force / tree engines agree", _check_engines),
    ("discrete plug-in oracle", _check_plugin),
    ("X/Y symmetry and row permutation", _check_symmetry_permutation),
    ("identical rows give zero", _check_identical_rows),
    ("KL entropy of U[0,1]", _check_kl_uniform),
]


def run_selftest(emit: Callable[[str], None] = print) -> bool:
    """Run every check, emit one line each; True iff all pass."""
    ok = True
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            check()
        except Exception as exc:  # noqa: BLE001 -- every failure is reported
            ok = False
            emit(f"FAIL  {name}: {exc}")
        else:
            emit(f"PASS  {name} ({time.perf_counter() - start:.2f}s)")
    return ok
