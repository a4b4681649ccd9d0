import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmsearch import (
    CabinetsInstance,
    CMSInstance,
    Matroid,
    MSP,
    PLConcave,
    cabinet_value_curve,
    exact_dag_curve,
    exante_opt_cabinets,
    exante_opt_cms,
    fptas_dag_curve,
    maximize_separable_concave,
    polytope_member,
)
from cmsearch._config import SizeLimitError
from cmsearch.generators import random_matroid
from cmsearch.rng import make_rng

from conftest import box_msp, cab


def test_box_curve():
    f = exact_dag_curve(box_msp())
    assert f(0.5) == pytest.approx(0.4)
    assert f(1.0) == pytest.approx(0.4)
    assert np.allclose(f.slopes, [0.8, 0.0])


def test_sink_curve_is_linear():
    assert exact_dag_curve(MSP.sink(3.0)).max_abs_diff(PLConcave.linear(3.0)) < 1e-12
    assert fptas_dag_curve(MSP.sink(3.0), 0.01, 0.1).max_abs_diff(PLConcave.linear(3.0)) < 1e-12


def test_costly_msp_curve_is_zero():
    m = MSP.build([0, 0, 1], [[(2.0, [(1, 0.5), (2, 0.5)])], [], []])
    assert exact_dag_curve(m).max_abs_diff(PLConcave.zero()) == 0


def test_fptas_box_sandwich():
    v = fptas_dag_curve(box_msp(), 1e-3, 0.1)(1.0)
    assert (0.4 - 0.001) / 1.1 <= v <= 0.401 * 1.1


def test_fptas_zero_value():
    m = MSP.build([0, 0, 0], [[(0.1, [(1, 0.5), (2, 0.5)])], [], []])
    assert fptas_dag_curve(m, 0.01, 0.1).max_abs_diff(PLConcave.zero()) == 0


def test_fptas_params():
    with pytest.raises(ValueError):
        fptas_dag_curve(box_msp(), 0.0, 0.1)
    with pytest.raises(ValueError):
        fptas_dag_curve(box_msp(), 0.01, 1.0)


def test_exact_budget():
    with pytest.raises(SizeLimitError):
        exact_dag_curve(box_msp(), budget=0)


def test_greedy_example():
    f1 = PLConcave.from_segments(0.0, [2.0, 0.0], [0.5, 0.5])
    q = maximize_separable_concave(Matroid.uniform(2, 1), [f1, PLConcave.linear(1.0)])
    assert np.allclose(q, [0.5, 0.5])
    assert f1(q[0]) + q[1] == pytest.approx(1.5)
    assert np.allclose(maximize_separable_concave(Matroid.uniform(2, 1), [PLConcave.zero()] * 2), 0)


def test_cabinet_curves():
    f, _ = cabinet_value_curve(cab((0.5, [10.0]), (0.5, [0.0])))
    assert np.allclose(f.slopes, [10, 0]) and f(0.5) == pytest.approx(5)
    f, wit = cabinet_value_curve(cab((0.5, [10.0, 6.0]), (0.5, [0.0, 6.0])))
    assert np.allclose(f.slopes, [10, 2])
    lam, _ = wit.at(0.75)
    assert sum(lam.values()) == pytest.approx(1.0)


def test_cabinets_exante_examples():
    one = cab((0.5, [10.0]), (0.5, [0.0]))
    s = exante_opt_cabinets(CabinetsInstance((one,), Matroid.uniform(1, 1)))
    assert s.q[0] == pytest.approx(0.5) and s.objective == pytest.approx(5) and s.z[0] == pytest.approx(10)
    s = exante_opt_cabinets(CabinetsInstance((one, one), Matroid.uniform(2, 1)))
    assert np.allclose(s.q, [0.5, 0.5]) and s.objective == pytest.approx(10)
    zero = cab((1.0, [0.0]))
    s = exante_opt_cabinets(CabinetsInstance((zero,), Matroid.uniform(1, 1)))
    assert s.objective == 0 and s.q[0] == 0


def test_cms_exante_examples():
    s = exante_opt_cms(CMSInstance((box_msp(),), Matroid.uniform(1, 1)))
    assert s.q[0] == pytest.approx(0.5) and s.objective == pytest.approx(0.4) and s.z[0] == pytest.approx(0.8)
    inst = CMSInstance((box_msp(), box_msp()), Matroid.uniform(2, 1))
    s = exante_opt_cms(inst)
    assert np.allclose(s.q, [0.5, 0.5]) and s.objective == pytest.approx(0.8)
    c, eps = 1e-3, 0.1
    h = exante_opt_cms(inst, "fptas", c=c, eps=eps).objective
    assert (0.8 - 2 * c) / (1 + eps) <= h <= (0.8 + 2 * c) * (1 + eps)


@given(st.integers(0, 10_000))
def test_greedy_beats_grid_search(seed):
    rng = make_rng(seed)
    m = random_matroid(rng, int(rng.integers(1, 4)), max_rank=2)
    curves = []
    for _ in range(m.n):
        k = int(rng.integers(1, 4))
        curves.append(PLConcave.from_segments(0.0, np.sort(rng.uniform(-1, 5, k))[::-1], rng.dirichlet(np.ones(k))))
    q = maximize_separable_concave(m, curves)
    assert polytope_member(m, q, tol=1e-9) is True
    val = sum(f(x) for f, x in zip(curves, q))
    grid = np.linspace(0, 1, 21)
    best = -np.inf
    for pt in np.array(np.meshgrid(*[grid] * m.n)).reshape(m.n, -1).T:
        if polytope_member(m, pt) is True:
            best = max(best, sum(f(x) for f, x in zip(curves, pt)))
    assert val >= best - 1e-9
