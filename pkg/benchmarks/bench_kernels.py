"""Benchmark the compiled kernels against the numpy backend on the shapes
this package actually runs: bag-of-words intent batches (sparse rows) and
character-count NER batches (short dense rows).

Run: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from convobot.net import kernels


def sparse_batch(rng, rows, cols, density):
    x = np.zeros((rows, cols))
    mask = rng.random((rows, cols)) < density
    x[mask] = rng.integers(1, 3, size=int(mask.sum()))
    return np.ascontiguousarray(x)


def bench_step(backend, x, sizes, repeats):
    rng = np.random.default_rng(0)
    w1 = rng.normal(size=(x.shape[1], sizes[0]))
    b1 = np.zeros(sizes[0])
    w2 = rng.normal(size=(sizes[0], sizes[1]))
    b2 = np.zeros(sizes[1])
    w3 = rng.normal(size=(sizes[1], sizes[2]))
    b3 = np.zeros(sizes[2])

    def once():
        a1 = backend.relu(backend.affine(x, w1, b1))
        a2 = backend.relu(backend.affine(a1, w2, b2))
        probs = backend.softmax_rows(backend.affine(a2, w3, b3))
        dz = probs.copy()
        dz[:, 0] -= 1.0
        gw3 = backend.matmul_at_b(a2, dz)
        dz2 = backend.relu_backward(backend.matmul_a_bt(dz, w3), a2)
        gw2 = backend.matmul_at_b(a1, dz2)
        dz1 = backend.relu_backward(backend.matmul_a_bt(dz2, w2), a1)
        gw1 = backend.matmul_at_b(x, dz1)
        backend.colsum(dz1)
        return gw1, gw2, gw3

    once()  # warm up
    started = time.perf_counter()
    for _ in range(repeats):
        once()
    return (time.perf_counter() - started) / repeats


def main():
    rng = np.random.default_rng(42)
    cases = [
        ("intent fwd+bwd (32x600 sparse 2%)", sparse_batch(rng, 32, 600, 0.02), (128, 64, 14), 200),
        ("NER fwd+bwd (32x70 dense-ish 12%)", sparse_batch(rng, 32, 70, 0.12), (128, 64, 4), 500),
        ("NER eval batch (2048x70)", sparse_batch(rng, 2048, 70, 0.12), (128, 64, 4), 20),
    ]

    backends = []
    for name in ("numpy", "cython"):
        try:
            backends.append((name, kernels.load_backend(name)))
        except ImportError:
            print(f"backend {name}: not available, skipping")

    print(f"active backend at import: {kernels.backend_name()}\n")
    header = f"{'case':<38}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, x, sizes, repeats in cases:
        times = [bench_step(backend, x, sizes, repeats) for _, backend in backends]
        row = f"{label:<38}" + "".join(f"{t * 1e6:>10.0f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)

    if len(backends) == 2:
        ref, fast = backends[0][1], backends[1][1]
        x = sparse_batch(rng, 16, 40, 0.2)
        w = rng.normal(size=(40, 8))
        b = rng.normal(size=8)
        assert np.allclose(ref.affine(x, w, b), fast.affine(x, w, b), atol=1e-12)
        print("\nbackends agree on a spot check (atol 1e-12)")


if __name__ == "__main__":
    main()
