"""Time the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--batch 32] [--steps 40] [--hidden 100] [--repeat 5]
"""

import argparse
import timeit

import numpy as np
import scipy.sparse as sp

from offenseval._kernels import available_backends


def lstm_case(rng, B, T, H, dtype):
    xw = rng.normal(size=(B, T, 4 * H)).astype(dtype)
    U = (rng.normal(size=(4 * H, H)) / np.sqrt(H)).astype(dtype)
    lengths = rng.integers(T // 2, T + 1, size=B).astype(np.int64)
    dh = rng.normal(size=(B, H)).astype(dtype)
    return xw, lengths, U, dh


def hinge_case(rng, n, d):
    X = sp.random(n, d, density=10 / d, format="csr", random_state=0)
    t = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return (X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, t,
            rng.permutation(n).astype(np.int64), d)


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=32)
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--hidden", type=int, default=100)
    ap.add_argument("--docs", type=int, default=13240)
    ap.add_argument("--vocab", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels unavailable; timing the numpy fallback only")

    rows = []
    for dtype in (np.float32, np.float64):
        xw, lengths, U, dh = lstm_case(rng, args.batch, args.steps, args.hidden, dtype)
        for name, mod in backends.items():
            fwd = mod.lstm_forward_steps(xw, lengths, U)
            t_f = best_of(lambda: mod.lstm_forward_steps(xw, lengths, U), args.repeat)
            t_b = best_of(lambda: mod.lstm_backward_steps(*fwd, lengths, U, dh), args.repeat)
            rows.append((f"lstm forward {np.dtype(dtype).name}", name, t_f))
            rows.append((f"lstm backward {np.dtype(dtype).name}", name, t_b))

    indptr, indices, data, t, order, d = hinge_case(rng, args.docs, args.vocab)
    for name, mod in backends.items():
        def epoch():
            mod.hinge_sgd_epoch(indptr, indices, data, t, order, np.zeros(d), 1.0, 0.0, 0.01, 1e-4)
        rows.append(("hinge sgd epoch", name, best_of(epoch, args.repeat)))

    print(f"{'kernel':<24}{'backend':<10}{'ms':>10}{'speedup':>10}")
    base = {k: v for k, b, v in rows if b == "python"}
    for kernel, name, secs in rows:
        print(f"{kernel:<24}{name:<10}{secs * 1e3:>10.2f}{base[kernel] / secs:>9.1f}x")


if __name__ == "__main__":
    main()
