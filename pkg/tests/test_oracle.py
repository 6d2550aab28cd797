import ast
import inspect
from types import SimpleNamespace

import numpy as np
import pytest

from descest import oracle
from descest.model import DescriptorModel, UncertaintyWeights

from instances import random_instance


def test_scalar_chain(scalar_chain):
    o = oracle.stacked_minimize(*scalar_chain)
    np.testing.assert_allclose(o.x_stack, [0.2, 0.6], atol=1e-15)
    assert o.min_cost == pytest.approx(0.4, abs=1e-15)
    assert o.marginal_Q[0, 0] == pytest.approx(5 / 3, abs=1e-15)
    assert o.marginal_center[0] == pytest.approx(0.6, abs=1e-15)
    assert o.marginal_alpha == pytest.approx(1.0, abs=1e-15)


def test_zero_record(scalar_chain):
    model, w, _ = scalar_chain
    o = oracle.stacked_minimize(model, w, [[0.0], [0.0]])
    assert np.all(o.x_stack == 0) and o.min_cost == 0


def test_single_step():
    model = DescriptorModel([1.0], [], [1.0])
    w = UncertaintyWeights(1.0, [], [1.0])
    o = oracle.stacked_minimize(model, w, [[1.0]])
    assert o.x_stack[0] == pytest.approx(0.5)
    assert o.min_cost == pytest.approx(0.5)


def test_interval_scalar_chain(scalar_chain):
    iv = oracle.direction_interval(oracle.stacked_minimize(*scalar_chain), [1.0])
    assert iv.lo == pytest.approx(0.0, abs=1e-15)
    assert iv.hi == pytest.approx(1.2, abs=1e-15)
    assert iv.center == pytest.approx(0.6)


def _fake(min_cost, Q, center):
    Q = np.atleast_2d(Q)
    return oracle.StackedSolution(np.zeros(1), min_cost, Q, np.asarray(center, float), 0.0, Q.shape[0])


def test_interval_boundary_feasible():
    iv = oracle.direction_interval(_fake(1.0, 2.0, [0.3]), [1.0])
    assert iv.lo == iv.hi == pytest.approx(0.3)


def test_interval_unobservable():
    iv = oracle.direction_interval(_fake(0.0, np.diag([1.0, 0.0]), [0.0, 0.0]), [0.0, 1.0])
    assert (iv.lo, iv.hi) == (-np.inf, np.inf)


def test_sampled_radius_unit_disk():
    e = SimpleNamespace(Q=np.eye(2), center=np.zeros(2), alpha=0.0)
    r = oracle.sampled_radius(e, 10_000)
    assert 0.999 <= r <= 1.0 + 1e-12


def test_sampled_radius_axes():
    e = SimpleNamespace(Q=np.diag([4.0, 1.0]), center=np.zeros(2), alpha=0.0)
    r = oracle.sampled_radius(e, 10_000)
    assert 0.999 <= r <= 1.0 + 1e-12


def test_sampled_radius_degenerate():
    e = SimpleNamespace(Q=np.eye(2), center=np.array([1.0, 0.0]), alpha=2.0)
    assert oracle.sampled_radius(e, 1000) == 0.0


def test_marginal_matches_conditional_minimum(rng):
    """Marginal form at x equals min of J over x_0..x_{N-1} with x_N = x fixed."""
    for _ in range(10):
        n, N = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        model, w, y, _ = random_instance(rng, n, N, descriptor=True)
        o = oracle.stacked_minimize(model, w, y)
        A, b, c = oracle.assemble(model, w, y)
        u = slice(0, n * N)
        for _ in range(10):
            x = rng.standard_normal(n)
            rest = np.linalg.lstsq(A[u, u], b[u] - A[u, n * N:] @ x, rcond=None)[0]
            J = oracle.stacked_cost(model, w, y, np.concatenate([rest, x]))
            assert o.marginal_form(x) == pytest.approx(J, rel=1e-9, abs=1e-9)


def test_min_cost_consistency(rng):
    for _ in range(10):
        model, w, y, _ = random_instance(rng, 2, 5)
        o = oracle.stacked_minimize(model, w, y)
        x = o.marginal_center
        assert o.marginal_alpha - x @ o.marginal_Q @ x == pytest.approx(o.min_cost, abs=1e-10)
        assert o.min_cost >= 0


def test_oracle_is_independent_of_recursion():
    tree = ast.parse(inspect.getsource(oracle))
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
            imported.update(a.name for a in node.names)
        elif isinstance(node, ast.Import):
            imported.update(a.name for a in node.names)
    assert not any("discrete" in name for name in imported)
