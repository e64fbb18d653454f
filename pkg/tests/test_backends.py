import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

import hermite_qmc
from hermite_qmc import _kernels_py as py

try:
    compiled = importlib.import_module("hermite_qmc._kernels")
except ImportError:  # pragma: no cover - exercised only without a build
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


@pytest.fixture(scope="module")
def nodes():
    rng = np.random.default_rng(7)
    x = np.concatenate([rng.normal(size=150) * 3, [0.0, 40.0, -40.0]])
    c = rng.dirichlet(np.ones(x.size))
    return x, c


@needs_ext
@pytest.mark.parametrize("k", [0, 1, 2, 33, 700, 4000])
@pytest.mark.parametrize("weighted", [False, True])
def test_hermite_scaled_agrees(nodes, k, weighted):
    x, _ = nodes
    a = compiled.hermite_scaled(k, x, weighted)
    b = py.hermite_scaled(k, x, weighted)
    np.testing.assert_array_equal(a[2], b[2])
    # near a root of H_k only the envelope of the recurrence is meaningful
    envelope = np.abs(a[0]) + np.abs(a[1])
    for u, v in zip(a[:2], b[:2]):
        assert np.all(np.abs(u - v) <= 1e-12 * envelope)


@needs_ext
def test_weighted_table_agrees(nodes):
    x, _ = nodes
    a, b = compiled.weighted_table(300, x), py.weighted_table(300, x)
    # weighted values are bounded by one, so an absolute tolerance is natural
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


@needs_ext
@pytest.mark.parametrize("m", [0, 1, 2, 511, 513, 2000])
def test_moments_agree(nodes, m):
    x, c = nodes
    x = np.clip(x, -8, 8)
    a = compiled.hermite_moments(x, c, m)
    b = py.hermite_moments(x, c, m)
    assert a.shape == b.shape == (m + 1,)
    np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-15)


@needs_ext
@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_series_agree(nodes, alpha):
    x, c = nodes
    x = np.clip(x, -8, 8)
    s0a, acca = compiled.hermite_series(x, c, alpha, 3000)
    s0b, accb = py.hermite_series(x, c, alpha, 3000)
    assert s0a == pytest.approx(s0b, rel=1e-15)
    assert acca == pytest.approx(accb, rel=1e-12)


def test_pure_switch_selects_fallback():
    env = dict(os.environ, HERMITE_QMC_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import hermite_qmc; print(hermite_qmc.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == "python"
    if compiled is not None:
        assert hermite_qmc.BACKEND == compiled.BACKEND != "python"


def test_fallback_wce_matches_default_backend():
    from hermite_qmc import build_rule, wce_hermite_1d
    rule = build_rule("hodnet", 2, 7)
    ref = wce_hermite_1d(2, rule, m=1500)
    x, w = rule.nodes[:, 0], rule.weights
    s0, acc = py.hermite_series(x, w, 2, 1500)
    assert s0 == pytest.approx(float(np.sum(w)), rel=1e-14)
    assert np.sqrt((1 - s0) ** 2 + acc) == pytest.approx(ref.value, rel=1e-11)
