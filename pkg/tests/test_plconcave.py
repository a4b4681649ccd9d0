import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmsearch import PLConcave, concave_envelope, iron, upper_expectation, weighted_sup_convolution
from cmsearch.plconcave import theta_grid

from conftest import dist


def test_upper_expectation_examples():
    g = upper_expectation(dist((1.0, 0.5), (3.0, 0.5)))
    assert g(0.25) == pytest.approx(0.75)
    assert g(0.5) == pytest.approx(1.5)
    assert g(1.0) == pytest.approx(2.0)
    assert upper_expectation(dist((4.0, 1.0)))(0.3) == pytest.approx(1.2)
    assert upper_expectation(dist((0.0, 1.0))).max_abs_diff(PLConcave.zero()) == 0


def test_sup_convolution_sink_split():
    f = weighted_sup_convolution([(0.5, PLConcave.linear(1.0)), (0.5, PLConcave.zero())])
    assert f(0.5) == pytest.approx(0.5)
    assert f(1.0) == pytest.approx(0.5)
    assert np.allclose(f.slopes, [1.0, 0.0])


def test_sup_convolution_merge():
    f1 = PLConcave.from_segments(0.0, [3.0, 1.0], [0.5, 0.5])
    f2 = PLConcave.linear(2.0)
    g = weighted_sup_convolution([(0.5, f1), (0.5, f2)])
    assert np.allclose(g.slopes, [3, 2, 1])
    assert np.allclose(np.diff(g.xs), [0.25, 0.5, 0.25])


def test_sup_convolution_identity():
    f = PLConcave.from_segments(0.1, [2.0, 0.5], [0.3, 0.7])
    assert weighted_sup_convolution([(1.0, f)]).max_abs_diff(f) < 1e-12


def test_envelope_examples():
    env = concave_envelope([PLConcave.linear(1.0), PLConcave.linear(0.0, 0.8)])
    assert env(0.5) == pytest.approx(0.9)
    f = PLConcave.from_segments(0.0, [2.0, 1.0], [0.5, 0.5])
    assert concave_envelope([f]).max_abs_diff(f) < 1e-12
    assert concave_envelope([f, f]).max_abs_diff(f) < 1e-12


def test_iron_example():
    grid = np.array([0.0, 0.3, 0.6, 1.0])
    f = iron([0.0, 5.0, 1.0, 2.0], grid, 0.3, 0.3)
    # capped to (0, .3, 1, 2), already monotone, then hulled
    assert f(1.0) == pytest.approx(2.0)
    assert f(0.6) >= 1.0
    assert f.is_concave()
    assert iron(np.zeros(4), grid, 0.3, 0.3).max_abs_diff(PLConcave.zero()) == 0


def test_rejects_bad_breakpoints():
    with pytest.raises(ValueError):
        PLConcave([0.0, 0.5], [0.0, 1.0])
    with pytest.raises(ValueError):
        PLConcave([0.0, 0.5, 1.0], [0.0, 0.1, 1.0])


def test_theta_grid():
    g = theta_grid(0.1, 0.5)
    assert g[0] == 0 and g[1] == 0.1 and g[-1] == 1
    assert np.all(g[2:-1] / g[1:-2] == pytest.approx(1.5))
    assert list(theta_grid(2.0, 0.1)) == [0.0, 1.0]


slopes = st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=4)


def _curve(sl, widths):
    sl = sorted(sl, reverse=True)
    w = np.asarray(widths[: len(sl)], dtype=float) + 0.05
    return PLConcave.from_segments(0.0, sl, w / w.sum())


@given(slopes, slopes, st.floats(0.05, 0.95))
def test_sup_convolution_matches_grid_search(s1, s2, w):
    f1 = _curve(s1, [1, 2, 3, 4])
    f2 = _curve(s2, [4, 3, 2, 1])
    g = weighted_sup_convolution([(w, f1), (1 - w, f2)])
    assert g.is_concave()
    for q in (0.1, 0.37, 0.8):
        # q = w*q1 + (1-w)*q2 with q1, q2 in [0, 1]
        q1 = np.linspace(max(0.0, (q - (1 - w)) / w), min(1.0, q / w), 2001)
        q2 = np.clip((q - w * q1) / (1 - w), 0, 1)
        best = np.max(w * f1(q1) + (1 - w) * f2(q2))
        assert g(q) >= best - 1e-9
        assert g(q) <= best + 1e-2


@given(slopes, slopes, st.floats(-1, 1))
def test_envelope_dominates(s1, s2, shift):
    f1 = _curve(s1, [1, 1, 1, 1])
    f2 = _curve(s2, [3, 1, 2, 1]).shift(shift)
    env = concave_envelope([f1, f2])
    q = np.linspace(0, 1, 101)
    assert np.all(env(q) >= np.maximum(f1(q), f2(q)) - 1e-9)
    assert env.is_concave()
