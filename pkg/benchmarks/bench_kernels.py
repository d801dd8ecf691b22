"""Time the numba and numpy kernel paths on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1]

Prints one line per kernel with the best-of-N wall time of each path and
the speed ratio.  Outputs are compared before timing; a mismatch aborts.
"""

import argparse
import time

import numpy as np

from onticfock import _accel


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (triggers JIT compilation on the numba path)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=0, atol=1e-10)


def cases(scale):
    rng = np.random.default_rng(0)
    boson_dims = np.full(6 + scale, 4, dtype=np.int64)
    fermion_dims = np.full(12 + scale, 2, dtype=np.int64)
    fermionic = np.ones(len(fermion_dims), dtype=np.bool_)
    freqs = rng.uniform(0.5, 2.0, size=len(boson_dims))
    vecs = rng.normal(size=(20000 * scale, 16)) + 1j * rng.normal(size=(20000 * scale, 16))
    return [
        ("occupations", "occupations", (boson_dims,)),
        ("lowering_coo[fermion]", "lowering_coo", (fermion_dims, fermionic, len(fermion_dims) - 1)),
        ("lowering_coo[boson]", "lowering_coo", (boson_dims, np.zeros(len(boson_dims), np.bool_), 3)),
        ("number_phases", "number_phases", (boson_dims, freqs, 0.7)),
        ("compensated_gram", "compensated_gram", (np.ascontiguousarray(vecs),)),
    ]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--scale", type=int, default=1)
    args = p.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'kernel':<24} {'numpy [s]':>11} {'numba [s]':>11} {'ratio':>8}")
    for label, name, inputs in cases(args.scale):
        np_fn = getattr(_accel, f"{name}_numpy")
        nb_fn = getattr(_accel, f"{name}_numba")
        if not same(np_fn(*inputs), nb_fn(*inputs)):
            raise SystemExit(f"{label}: numba and numpy outputs differ")
        t_np = best_of(np_fn, inputs, args.repeat)
        t_nb = best_of(nb_fn, inputs, args.repeat)
        print(f"{label:<24} {t_np:11.4e} {t_nb:11.4e} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
