"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the "acceptance criteria" summary section.
"""

import time
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixedcmi.bench import BenchConfig, run_bench
from mixedcmi.data import ColumnKind, Dataset, RoleAssignment
from mixedcmi.estimators import (
    EstimateParams,
    EstimatorKind,
    estimate,
    estimate_cmi_proposed,
    kl_entropy,
)
from mixedcmi.knn import batch_profiles, chain_ok
from mixedcmi.numerics import digamma, mean
from mixedcmi.selftest import uniform_knn_log_mass
from mixedcmi.simulators import Scenario, truth

from conftest import random_mixed

N_LARGE, N_SMALL = 1000, 100


def _cell(bench, scenario, kind=EstimatorKind.PROPOSED, n=N_LARGE):
    cell = bench.cell(scenario, kind, n)
    assert cell.ok, cell.error
    return cell


# 1 -------------------------------------------------------------------------
def test_c01_egg_chain_zero_and_variance_shrinks():
    config = BenchConfig(
        scenarios=(Scenario.EGG_CHAIN,),
        estimators=(EstimatorKind.PROPOSED,),
        n_grid=(N_SMALL, N_LARGE),
        replications=100,
    )
    start = time.perf_counter()
    report = run_bench(config)
    elapsed = time.perf_counter() - start
    small = _cell(report, Scenario.EGG_CHAIN, n=N_SMALL)
    large = _cell(report, Scenario.EGG_CHAIN)
    print(f"mean={large.mean:.4f} var100={small.variance:.2e} var1000={large.variance:.2e} "
          f"time={elapsed:.1f}s")
    assert abs(large.mean) <= 0.05
    assert large.variance < small.variance
    assert elapsed <= 120


# 2 -------------------------------------------------------------------------
def test_c02_disc_unif_cont_near_truth(paired_bench):
    target = 0.405465
    large = _cell(paired_bench, Scenario.DISC_UNIF_CONT)
    small = _cell(paired_bench, Scenario.DISC_UNIF_CONT, n=N_SMALL)
    print(f"mean1000={large.mean:.4f} mean100={small.mean:.4f} target={target}")
    assert abs(large.mean - target) <= 0.05
    assert abs(small.mean - target) <= 0.15


# 3 -------------------------------------------------------------------------
def test_c03_four_point_near_truth(paired_bench):
    large = _cell(paired_bench, Scenario.FOUR_POINT_DISCRETE)
    assert abs(large.mean - 0.192745) <= 0.05


# 4 -------------------------------------------------------------------------
def test_c04_gauss_mixture_near_truth(paired_bench):
    large = _cell(paired_bench, Scenario.GAUSS_DISCRETE_MIXTURE)
    assert abs(large.mean - 0.744003) <= 0.07


# 5 -------------------------------------------------------------------------
@pytest.mark.parametrize(
    "scenario",
    [Scenario.DISC_UNIF_CONT, Scenario.FOUR_POINT_DISCRETE, Scenario.GAUSS_DISCRETE_MIXTURE],
)
def test_c05_proposed_no_worse_than_ravk1_and_fp(paired_bench, scenario):
    value = truth(scenario).value
    cells = {e: _cell(paired_bench, scenario, e) for e in
             (EstimatorKind.PROPOSED, EstimatorKind.RAVK1, EstimatorKind.FP)}
    assert len({tuple(c.seeds) for c in cells.values()}) == 1  # paired datasets
    err = {e.value: abs(c.mean - value) for e, c in cells.items()}
    print(err)
    assert err["proposed"] <= err["ravk1"]
    assert err["proposed"] <= err["fp"]


# 6 -------------------------------------------------------------------------
@pytest.mark.parametrize("k", [3, 7])
def test_c06_knn_ball_log_mass_identity(k):
    n, draws = 500, 200
    rng = np.random.default_rng(600 + k)
    per_draw = [mean(uniform_knn_log_mass(rng.random((n, 2)), k)) for _ in range(draws)]
    target = digamma(float(k)) - digamma(float(n))
    assert abs(mean(per_draw) - target) <= 0.02


# 7 -------------------------------------------------------------------------
def _tied_categorical(rng):
    """Categorical X, Y, Z where every row pattern occurs at least three times."""
    levels = [int(rng.integers(1, 4)) for _ in range(3)]
    n = int(rng.integers(9, 51))
    patterns = [tuple(rng.integers(0, lv) for lv in levels) for _ in range(n // 3)]
    rows = [p for p in patterns for _ in range(3)]
    rows += [patterns[int(j)] for j in rng.integers(0, len(patterns), n - len(rows))]
    rows = [rows[int(j)] for j in rng.permutation(n)]
    arrays = [["abc"[r[c]] for r in rows] for c in range(3)]
    return Dataset.from_arrays(["x", "y", "z"], [ColumnKind.CATEGORICAL] * 3, arrays), rows


def _plugin_log_ratio(rows):
    def others(key):
        counts = Counter(key(r) for r in rows)
        return np.array([counts[key(r)] - 1 for r in rows], dtype=float)

    joint = others(lambda r: r)
    xz = others(lambda r: (r[0], r[2]))
    yz = others(lambda r: (r[1], r[2]))
    z = others(lambda r: r[2])
    return np.log(joint) - (np.log(xz) + np.log(yz)) + np.log(z)


def test_c07_discrete_plugin_oracle_bitwise():
    rng = np.random.default_rng(7007)
    roles = RoleAssignment((0,), (1,), (2,))
    for _ in range(30):
        ds, rows = _tied_categorical(rng)
        table = batch_profiles(ds, roles, 1)
        assert np.all(table.rho == 0)
        res = estimate_cmi_proposed(ds, roles, EstimateParams(k=1, clamp=False), table)
        assert np.array_equal(res.xi, _plugin_log_ratio(rows))


# 8 -------------------------------------------------------------------------
def test_c08_brute_and_tree_profiles_identical():
    rng = np.random.default_rng(8008)
    layouts = [((0,), (1,), (2, 3)), ((2,), (0, 3), (1,)), ((0, 2), (1, 3), ()), ((3,), (2,), (0, 1))]
    for t in range(100):
        n = int(rng.integers(10, 301))
        ds = random_mixed(rng, n, levels=int(rng.integers(1, 5)),
                          rounding=[None, 0, 1][t % 3])
        roles = RoleAssignment(*layouts[t % len(layouts)])
        k = int(rng.integers(1, 11))
        assert batch_profiles(ds, roles, k, "brute").equals(batch_profiles(ds, roles, k, "tree"))


# 9 -------------------------------------------------------------------------
def _shrinkage_sample(rng, n, d):
    x = rng.random(n)
    y = (x + rng.random(n)) / 2
    zs = [rng.integers(0, 2, n) for _ in range(d)]
    kinds = [ColumnKind.CONTINUOUS] * 2 + [ColumnKind.DISCRETE] * d
    names = ["x", "y"] + [f"z{j}" for j in range(d)]
    roles = RoleAssignment((0,), (1,), tuple(range(2, 2 + d)))
    return Dataset.from_arrays(names, kinds, [x, y, *zs]), roles


def test_c09_high_dimensional_shrinkage():
    rng = np.random.default_rng(9009)
    medians = {}
    for d in (1, 4, 16, 64):
        values = []
        for _ in range(20):
            ds, roles = _shrinkage_sample(rng, 500, d)
            values.append(estimate_cmi_proposed(ds, roles, EstimateParams(k=7)).estimate)
        medians[d] = float(np.median(values))
    print(medians)
    assert medians[1] > medians[4] > medians[16] >= medians[64]
    assert medians[64] <= 0.05


# 10 ------------------------------------------------------------------------
CMI_KINDS = [EstimatorKind.PROPOSED, EstimatorKind.FP, EstimatorKind.RAVK1, EstimatorKind.RAVK2]


@st.composite
def problems(draw):
    n = draw(st.integers(6, 40))
    r = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    ds = random_mixed(r, n, levels=draw(st.integers(1, 3)))
    layout = draw(st.sampled_from([((0,), (1,), (2, 3)), ((2,), (0, 3), (1,)), ((0, 2), (1, 3), ())]))
    k = draw(st.integers(1, min(5, n - 1)))
    return ds, RoleAssignment(*layout), k


@settings(max_examples=200, deadline=None)
@given(problems(), st.sampled_from(CMI_KINDS))
def test_c10_symmetry(problem, kind):
    ds, roles, k = problem
    params = EstimateParams(k=k, clamp=False)
    a = estimate(ds, roles, kind, params)
    b = estimate(ds, roles.swapped(), kind, params)
    assert np.array_equal(a.xi, b.xi) and a.estimate == b.estimate


@settings(max_examples=200, deadline=None)
@given(problems(), st.sampled_from(CMI_KINDS), st.integers(0, 2**32 - 1))
def test_c10_permutation(problem, kind, seed):
    ds, roles, k = problem
    order = np.random.default_rng(seed).permutation(ds.n)
    params = EstimateParams(k=k, clamp=False)
    a = estimate(ds, roles, kind, params)
    b = estimate(ds.take_rows(order), roles, kind, params)
    assert np.array_equal(a.xi[order], b.xi)
    assert a.estimate == b.estimate


@st.composite
def numeric_problems(draw):
    n = draw(st.integers(6, 40))
    r = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    ds = random_mixed(r, n, d_cont=3, d_disc=1, d_cat=0, levels=draw(st.integers(1, 3)))
    layout = draw(st.sampled_from([((0,), (1,), (2, 3)), ((3,), (0, 2), (1,)), ((0, 3), (1, 2), ())]))
    k = draw(st.integers(1, min(5, n - 1)))
    return ds, RoleAssignment(*layout), k


@settings(max_examples=200, deadline=None)
@given(numeric_problems(), st.sampled_from(CMI_KINDS), st.integers(-10, 10))
def test_c10_scaling(problem, kind, exponent):
    # powers of two scale every distance exactly, so tie structure is preserved bit for bit
    ds, roles, k = problem
    factor = 2.0**exponent
    scaled = Dataset.from_arrays(ds.names, ds.kinds, list((ds.values * factor).T))
    params = EstimateParams(k=k, clamp=False)
    a, b = batch_profiles(ds, roles, k), batch_profiles(scaled, roles, k)
    assert np.array_equal(a.rho * factor, b.rho)
    for name in ("tilde_k", "n_xz", "n_yz", "n_z", "star_xz", "star_yz", "star_z"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name
    assert np.array_equal(estimate(ds, roles, kind, params).xi,
                          estimate(scaled, roles, kind, params).xi)


@settings(max_examples=200, deadline=None)
@given(problems())
def test_c10_chain_inequality(problem):
    ds, roles, k = problem
    table = batch_profiles(ds, roles, k)
    for profile in table:
        assert chain_ok(profile, k, ds.n, mi=roles.is_mi)
        assert k <= profile.tilde_k <= min(profile.n_xz, profile.n_yz) <= profile.n_z


@settings(max_examples=200, deadline=None)
@given(problems(), st.sampled_from(CMI_KINDS))
def test_c10_clamp(problem, kind):
    ds, roles, k = problem
    raw = estimate(ds, roles, kind, EstimateParams(k=k, clamp=False))
    clamped = estimate(ds, roles, kind, EstimateParams(k=k, clamp=True))
    assert clamped.estimate == max(raw.estimate, 0.0) >= 0.0
    assert clamped.clamped and not raw.clamped
    assert np.array_equal(raw.xi, clamped.xi)


# 11 ------------------------------------------------------------------------
@pytest.mark.parametrize(
    "draw,expected",
    [(lambda rng, n: rng.random(n), 0.0),
     (lambda rng, n: rng.normal(size=n), 0.5 * np.log(2 * np.pi * np.e))],
    ids=["uniform", "normal"],
)
def test_c11_kl_entropy(draw, expected):
    rng = np.random.default_rng(1111)
    values = [
        kl_entropy(Dataset.from_arrays(["u"], [ColumnKind.CONTINUOUS], [draw(rng, 1000)]))
        for _ in range(100)
    ]
    assert abs(expected - 1.4189) < 1e-4 or expected == 0.0
    assert abs(mean(values) - expected) <= 0.05
