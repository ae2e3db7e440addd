import numpy as np
import pytest
import scipy.sparse as sp

from offenseval import _kernels

BACKENDS = _kernels.available_backends()
needs_cython = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")
TOL = {np.float64: 1e-12, np.float32: 2e-5}


def test_backend_selected():
    assert _kernels.BACKEND in BACKENDS


def _lstm_case(rng, dtype, B=5, T=7, H=4):
    xw = rng.normal(size=(B, T, 4 * H)).astype(dtype)
    U = (0.5 * rng.normal(size=(4 * H, H))).astype(dtype)
    lengths = rng.integers(0, T + 1, size=B).astype(np.int64)
    lengths[0] = T
    dh = rng.normal(size=(B, H)).astype(dtype)
    return xw, lengths, U, dh


@needs_cython
@pytest.mark.parametrize("dtype", [np.float64, np.float32])
def test_lstm_backends_agree(rng, dtype):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for _ in range(10):
        xw, lengths, U, dh = _lstm_case(rng, dtype)
        a = py.lstm_forward_steps(xw, lengths, U)
        b = cy.lstm_forward_steps(xw, lengths, U)
        for x, y in zip(a, b):
            assert x.dtype == y.dtype == dtype
            np.testing.assert_allclose(x, y, rtol=TOL[dtype], atol=TOL[dtype])
        ga = py.lstm_backward_steps(*a, lengths, U, dh)
        gb = cy.lstm_backward_steps(*a, lengths, U, dh)
        for x, y in zip(ga, gb):
            np.testing.assert_allclose(x, y, rtol=TOL[dtype], atol=TOL[dtype])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_lstm_padding_carries_state(rng, name):
    k = BACKENDS[name]
    xw, lengths, U, _ = _lstm_case(rng, np.float64)
    _, cs, hs = k.lstm_forward_steps(xw, lengths, U)
    for r, n in enumerate(lengths):
        assert np.all(hs[r, n:] == hs[r, n])
        assert np.all(cs[r, n:] == cs[r, n])
    assert np.all(hs[:, 0] == 0)


def _hinge_case(rng, n=30, d=8):
    X = sp.random(n, d, density=0.4, random_state=int(rng.integers(1 << 31)), format="csr")
    t = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    order = rng.permutation(n).astype(np.int64)
    return X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, t, order


@needs_cython
def test_hinge_backends_agree_bitwise(rng):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for _ in range(10):
        indptr, indices, data, t, order = _hinge_case(rng)
        w1, w2 = np.zeros(8), np.zeros(8)
        s1 = s2 = 1.0
        b1 = b2 = 0.0
        for _ in range(5):
            s1, b1, h1 = py.hinge_sgd_epoch(indptr, indices, data, t, order, w1, s1, b1, 0.05, 1e-3)
            s2, b2, h2 = cy.hinge_sgd_epoch(indptr, indices, data, t, order, w2, s2, b2, 0.05, 1e-3)
            assert (s1, b1, h1) == (s2, b2, h2)
            assert np.array_equal(w1, w2)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_hinge_epoch_matches_plain_update(rng, name):
    # Oracle: the unscaled per-example subgradient step on w.
    k = BACKENDS[name]
    indptr, indices, data, t, order = _hinge_case(rng)
    X = sp.csr_matrix((data, indices, indptr), shape=(30, 8)).toarray()
    lr, lam = 0.05, 1e-2
    w_ref, b_ref = np.zeros(8), 0.0
    for i in order:
        margin = t[i] * (X[i] @ w_ref + b_ref)
        w_ref *= 1 - lr * lam
        if margin < 1:
            w_ref += lr * t[i] * X[i]
            b_ref += lr * t[i]
    v = np.zeros(8)
    scale, b, _ = k.hinge_sgd_epoch(indptr, indices, data, t, order, v, 1.0, 0.0, lr, lam)
    np.testing.assert_allclose(scale * v, w_ref, rtol=1e-10, atol=1e-12)
    assert b == pytest.approx(b_ref, abs=1e-12)


def test_benchmark_script_runs(capsys):
    import runpy
    from pathlib import Path
    script = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    bench = runpy.run_path(str(script))
    bench["main"](["--batch", "2", "--steps", "3", "--hidden", "4", "--docs", "20",
                   "--vocab", "50", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "hinge sgd epoch" in out and "lstm forward float32" in out
