import itertools
import math

import numpy as np
import pytest

from mixedcmi.data import ColumnKind
from mixedcmi.simulators import ROLES, Scenario, ScenarioSpec, generate, truth


def test_egg_chain_structure():
    ds, roles = generate(ScenarioSpec(Scenario.EGG_CHAIN, 100_000, seed=1))
    x, y, z = ds.values.T
    assert abs(x.mean() - 10) <= 0.2
    assert np.all(y <= z)
    assert ds.kinds == [ColumnKind.CONTINUOUS, ColumnKind.DISCRETE, ColumnKind.DISCRETE]
    assert roles == ROLES


def test_four_point_mass():
    ds, _ = generate(ScenarioSpec(Scenario.FOUR_POINT_DISCRETE, 100_000, seed=2))
    x, y, _ = ds.values.T
    assert abs(np.mean((x == 1) & (y == 1)) - 0.4) <= 0.01
    assert set(np.unique(x)) == {-1.0, 1.0} and set(np.unique(y)) == {-1.0, 1.0}


def test_disc_unif_cont_support():
    ds, _ = generate(ScenarioSpec(Scenario.DISC_UNIF_CONT, 20_000, seed=3))
    x, y, z = ds.values.T
    assert set(np.unique(x)) == {0.0, 1.0, 2.0, 3.0}
    assert np.all((y >= x) & (y <= x + 2))
    assert set(np.unique(z)) <= {0.0, 1.0, 2.0, 3.0}


def test_mixture_balance():
    n = 10_000
    ds, _ = generate(ScenarioSpec(Scenario.GAUSS_DISCRETE_MIXTURE, n, seed=4))
    x, y, z = ds.values.T
    discrete = np.isin(x, (-1.0, 1.0)) & np.isin(y, (-1.0, 1.0))
    se = math.sqrt(0.25 / n)
    assert abs(discrete.mean() - 0.5) <= 3 * se
    cont = ~discrete
    assert np.corrcoef(x[cont], y[cont])[0, 1] == pytest.approx(0.8, abs=0.03)
    assert abs(z.mean() - 0.6) < 0.05


@pytest.mark.parametrize("scenario", list(Scenario))
def test_generation_is_deterministic(scenario):
    a = generate(ScenarioSpec(scenario, 50, seed=9))[0]
    b = generate(ScenarioSpec(scenario, 50, seed=9))[0]
    c = generate(ScenarioSpec(scenario, 50, seed=10))[0]
    assert a == b
    assert a != c


def test_truth_values():
    assert truth(Scenario.EGG_CHAIN).value == 0.0
    assert truth(Scenario.DISC_UNIF_CONT).value == pytest.approx(math.log(3) - math.log(2), abs=1e-12)
    assert truth(Scenario.DISC_UNIF_CONT).value == pytest.approx(0.405465, abs=1e-6)
    assert truth(Scenario.FOUR_POINT_DISCRETE).value == pytest.approx(0.192745, abs=1e-6)
    mixture = 0.4 * math.log(3.2) + 0.1 * math.log(0.8) + 0.125 * math.log(4 / 0.36)
    assert truth(Scenario.GAUSS_DISCRETE_MIXTURE).value == pytest.approx(mixture, abs=1e-12)


def test_four_point_truth_matches_exhaustive_plugin():
    mass = {(1, 1): 0.4, (-1, -1): 0.4, (1, -1): 0.1, (-1, 1): 0.1}
    px = {v: sum(p for (a, _), p in mass.items() if a == v) for v in (1, -1)}
    py = {v: sum(p for (_, b), p in mass.items() if b == v) for v in (1, -1)}
    # Z independent of (X, Y): Poisson(2) weights factor out of every ratio
    pz = [math.exp(-2) * 2**j / math.factorial(j) for j in range(60)]
    total = 0.0
    for ((a, b), p), w in itertools.product(mass.items(), pz):
        pxyz = p * w
        total += pxyz * math.log(pxyz * w / ((px[a] * w) * (py[b] * w)))
    assert total == pytest.approx(truth(Scenario.FOUR_POINT_DISCRETE).value, abs=1e-12)


def test_scenario_parse():
    assert Scenario.parse("3") is Scenario.FOUR_POINT_DISCRETE
    assert Scenario.parse("EggChain") is Scenario.EGG_CHAIN
    assert Scenario.parse("gauss-mixture") is Scenario.GAUSS_DISCRETE_MIXTURE
    with pytest.raises(ValueError):
        Scenario.parse("nope")


def test_spec_requires_positive_n():
    with pytest.raises(ValueError):
        ScenarioSpec(Scenario.EGG_CHAIN, 0)
