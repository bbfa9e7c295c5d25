"""Compare the numba and numpy statevector kernels.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Workloads: a full-size classifier circuit (20 mouth vertices, 11 qubits)
and a random controlled-rotation program on 18 qubits.  Both kernels run the
same compiled program; results are checked for agreement before timing.
"""

import argparse
import time

import numpy as np

from graphiq import _kernels
from graphiq.classifier import TrainingSet, build_classifier_circuit
from graphiq.simulator import Gate, compile_gates


def classifier_program():
    rng = np.random.default_rng(0)
    vecs = [rng.uniform(1.0, 50.0, size=190) for _ in range(3)]
    circ = build_classifier_circuit(vecs[0], TrainingSet([(vecs[1], 1), (vecs[2], -1)]))
    return circ.num_qubits, circ.program()


def random_program(nq=18, count=400):
    rng = np.random.default_rng(1)
    gates = []
    for _ in range(count):
        q = rng.permutation(nq)[:3]
        ctrl = tuple((int(c), int(rng.integers(2))) for c in q[1 : 1 + rng.integers(0, 3)])
        gates.append(Gate("RY", int(q[0]), float(rng.uniform(-3, 3)), ctrl))
    return nq, compile_gates(gates)


def timeit(fn, nq, prog, repeat):
    best = float("inf")
    for _ in range(repeat):
        state = np.zeros(1 << nq, dtype=np.complex128)
        state[0] = 1.0
        t0 = time.perf_counter()
        fn(state, *prog)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    print(f"{'workload':<22} {'gates':>6} {'qubits':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for name, (nq, prog) in (("classifier n=20", classifier_program()), ("random 18q", random_program())):
        a = np.zeros(1 << nq, dtype=np.complex128)
        a[0] = 1.0
        b = a.copy()
        _kernels.numpy_apply_program(a, *prog)
        _kernels.numba_apply_program(b, *prog)  # also triggers compilation
        assert np.allclose(a, b, atol=1e-12)
        t_np = timeit(_kernels.numpy_apply_program, nq, prog, args.repeat)
        t_nb = timeit(_kernels.numba_apply_program, nq, prog, args.repeat)
        print(f"{name:<22} {len(prog[1]):>6} {nq:>6} {1e3 * t_np:>10.3f} {1e3 * t_nb:>10.3f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
