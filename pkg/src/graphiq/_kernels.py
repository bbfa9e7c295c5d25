"""Statevector update kernels.

Every gate the simulator knows reduces to a 2x2 matrix applied to one target
qubit on the subspace where ``index & cmask == cval``.  A whole circuit is
therefore a "program" of four flat arrays, and the hot loop is one call.

Two implementations share that contract:

* ``numba``: ``@njit`` loops over exactly the matching amplitude pairs.
* ``numpy``: vectorised fancy indexing, one Python-level step per gate.

``GRAPHIQ_KERNEL=numpy`` forces the fallback; the default is numba when it
imports.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

__all__ = [
    "KERNEL",
    "apply_matrix",
    "apply_program",
    "numpy_apply_matrix",
    "numpy_apply_program",
    "numba_apply_matrix",
    "numba_apply_program",
    "HAVE_NUMBA",
]


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _pair_indices(dim: int, bit: int, cmask: int, cval: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(dim, dtype=np.int64)
    i0 = idx[(idx & (cmask | bit)) == cval]
    i0.setflags(write=False)
    i1 = i0 | bit
    i1.setflags(write=False)
    return i0, i1


def numpy_apply_matrix(state: np.ndarray, mat: np.ndarray, target: int, cmask: int, cval: int) -> int:
    """Apply ``mat`` in place; returns the number of amplitude pairs updated."""
    i0, i1 = _pair_indices(state.shape[0], 1 << int(target), int(cmask), int(cval))
    a0 = state[i0]
    a1 = state[i1]
    state[i0] = mat[0, 0] * a0 + mat[0, 1] * a1
    state[i1] = mat[1, 0] * a0 + mat[1, 1] * a1
    return i0.shape[0]


def numpy_apply_program(state, mats, targets, cmasks, cvals) -> None:
    for g in range(mats.shape[0]):
        numpy_apply_matrix(state, mats[g], targets[g], cmasks[g], cvals[g])


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _nb_apply_one(state, m00, m01, m10, m11, target, cmask, cval):
        dim = state.shape[0]
        bit = np.int64(1) << target
        free = (dim - 1) & ~(cmask | bit)
        # walk every submask of `free`; each one fixes a distinct pair
        sub = np.int64(0)
        count = 0
        while True:
            i0 = sub | cval
            i1 = i0 | bit
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = m00 * a0 + m01 * a1
            state[i1] = m10 * a0 + m11 * a1
            count += 1
            sub = (sub - free) & free
            if sub == 0:
                break
        return count

    @njit(cache=True, nogil=True)
    def _nb_apply_program(state, mats, targets, cmasks, cvals):
        for g in range(mats.shape[0]):
            _nb_apply_one(
                state,
                mats[g, 0, 0],
                mats[g, 0, 1],
                mats[g, 1, 0],
                mats[g, 1, 1],
                targets[g],
                cmasks[g],
                cvals[g],
            )

    def numba_apply_matrix(state, mat, target, cmask, cval) -> int:
        """Apply ``mat`` in place; returns the number of amplitude pairs updated."""
        mat = np.asarray(mat, dtype=np.complex128)
        return int(
            _nb_apply_one(
                state, mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1],
                np.int64(target), np.int64(cmask), np.int64(cval),
            )
        )

    def numba_apply_program(state, mats, targets, cmasks, cvals) -> None:
        _nb_apply_program(state, mats, targets, cmasks, cvals)

else:  # pragma: no cover
    numba_apply_matrix = numpy_apply_matrix
    numba_apply_program = numpy_apply_program


def _select() -> str:
    wanted = os.environ.get("GRAPHIQ_KERNEL", "").strip().lower()
    if wanted not in ("", "numba", "numpy"):
        raise ValueError(f"GRAPHIQ_KERNEL must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


KERNEL = _select()

if KERNEL == "numba":
    apply_matrix = numba_apply_matrix
    apply_program = numba_apply_program
else:
    apply_matrix = numpy_apply_matrix
    apply_program = numpy_apply_program
