"""Amplitude encoding of adjacency vectors and state-preparation synthesis.

The preparation circuit is built the usual way for arbitrary states: walk
the amplitude tree bottom-up, disentangling qubit 0, then 1, ... with a
uniformly controlled Rz (relative phase) and Ry (magnitude split) per level,
then emit the levels in reverse so the circuit maps ``|0...0>`` onto the
target.  Each uniformly controlled rotation is expanded with the Gray-code
CX ladder.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .simulator import Gate, Program, compile_gates, gates_from_text, gates_to_text

__all__ = [
    "AmplitudeVector",
    "CircuitFragment",
    "EncodingError",
    "encode",
    "qubits_for",
    "multiplexed_rotation",
    "synthesize_state_prep",
    "ANGLE_TOL",
    "gate_count_bound",
]

# rotations smaller than this are dropped from synthesized circuits
ANGLE_TOL = 1e-14
NORM_TOL = 1e-10


class EncodingError(ValueError):
    """Raised when a vector cannot be turned into a quantum state."""


def qubits_for(dim: int) -> int:
    """Smallest N with 2**N >= dim."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return (dim - 1).bit_length()


@dataclass(frozen=True)
class AmplitudeVector:
    amplitudes: np.ndarray
    gamma: float
    dim: int

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    def __len__(self) -> int:
        return self.amplitudes.shape[0]


def encode(vec) -> AmplitudeVector:
    """Normalise ``vec`` (an AdjacencyVector or 1-D array) into amplitudes.

    Entries are divided by the l2 norm of the non-zero entries and padded
    with exact zeros up to the next power of two.
    """
    g = np.asarray(getattr(vec, "entries", vec))
    if g.ndim != 1 or g.shape[0] == 0:
        raise EncodingError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(g)):
        raise EncodingError("vector has non-finite entries")
    nz = g[g != 0]
    if nz.size == 0:
        raise EncodingError("cannot encode an all-zero vector")
    gamma = float(np.sqrt(np.sum(np.abs(nz) ** 2)))
    d = g.shape[0]
    dtype = np.float64 if np.isrealobj(g) else np.complex128
    amps = np.zeros(1 << qubits_for(d), dtype=dtype)
    amps[:d] = g / gamma
    amps.setflags(write=False)
    return AmplitudeVector(amps, gamma, d)


@dataclass(frozen=True)
class CircuitFragment:
    """Gate list acting on qubits ``0..num_qubits-1`` of some register."""

    gates: tuple[Gate, ...]
    num_qubits: int

    def __post_init__(self):
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"gate {g.to_text()} exceeds {self.num_qubits} qubits")

    @cached_property
    def _compiled(self) -> Program:
        return compile_gates(self.gates)

    def program(self) -> Program:
        return self._compiled

    @cached_property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def __len__(self) -> int:
        return len(self.gates)

    def to_text(self) -> str:
        return f"# qubits {self.num_qubits}\n" + gates_to_text(self.gates)

    @classmethod
    def from_text(cls, text: str) -> "CircuitFragment":
        first = text.splitlines()[0].split()
        if first[:2] != ["#", "qubits"]:
            raise ValueError("fragment text must start with '# qubits N'")
        return cls(tuple(gates_from_text(text)), int(first[2]))


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _walsh(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform in natural order."""
    h = np.array(a, dtype=np.float64)
    size = h.shape[0]
    step = 1
    while step < size:
        h = h.reshape(-1, 2, step)
        h = np.stack((h[:, 0] + h[:, 1], h[:, 0] - h[:, 1]), axis=1)
        step *= 2
    return h.reshape(-1)


def _merge_cx_runs(gates: list[Gate]) -> list[Gate]:
    # CX gates sharing a target commute; keep one per control of odd multiplicity
    out: list[Gate] = []
    run: dict[tuple, int] = {}

    def flush():
        for key, count in run.items():
            if count % 2:
                out.append(Gate("CX", key[0], None, key[1]))
        run.clear()

    for g in gates:
        if g.kind == "CX":
            if run and next(iter(run))[0] != g.target:
                flush()
            key = (g.target, g.controls)
            run[key] = run.get(key, 0) + 1
        else:
            flush()
            out.append(g)
    flush()
    return out


def multiplexed_rotation(
    angles: Sequence[float], axis: str, target: int, controls: Sequence[int]
) -> list[Gate]:
    """Uniformly controlled rotation about ``axis`` ('y' or 'z').

    ``angles[j]`` is applied to ``target`` when the control register reads
    ``j``, with ``controls[b]`` holding bit ``b`` of ``j``.
    """
    kind = {"y": "RY", "z": "RZ"}[axis.lower()]
    angles = np.asarray(angles, dtype=np.float64)
    k = len(controls)
    if angles.shape != (1 << k,):
        raise ValueError(f"{k} controls need {1 << k} angles, got {angles.shape[0]}")
    if k == 0:
        a = float(angles[0])
        return [Gate(kind, target, a)] if abs(a) >= ANGLE_TOL else []
    if np.all(np.abs(angles) < ANGLE_TOL):
        return []
    h = _walsh(angles) / (1 << k)
    gates: list[Gate] = []
    last = (1 << k) - 1
    for i in range(1 << k):
        theta = float(h[_gray(i)])
        if abs(theta) >= ANGLE_TOL:
            gates.append(Gate(kind, target, theta))
        flip = ((i + 1) & -(i + 1)).bit_length() - 1 if i < last else k - 1
        gates.append(Gate("CX", target, None, ((controls[flip], 1),)))
    return _merge_cx_runs(gates)


def synthesize_state_prep(target) -> CircuitFragment:
    """Circuit taking ``|0...0>`` to ``target`` up to a global phase."""
    amps = np.asarray(getattr(target, "amplitudes", target))
    if amps.ndim != 1 or amps.shape[0] & (amps.shape[0] - 1):
        raise ValueError("target length must be a power of two")
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"target is not normalised (norm {norm!r})")
    n_qubits = amps.shape[0].bit_length() - 1

    mags = np.abs(amps).astype(np.float64)
    phases = np.where(mags > 0, np.angle(amps), 0.0)
    levels = []
    for _ in range(n_qubits):
        r0, r1 = mags[0::2], mags[1::2]
        p0, p1 = phases[0::2], phases[1::2]
        # a vanishing amplitude carries no phase of its own
        p0, p1 = np.where(r0 > 0, p0, p1), np.where(r1 > 0, p1, p0)
        levels.append((2.0 * np.arctan2(r1, r0), p1 - p0))
        mags = np.hypot(r0, r1)
        phases = 0.5 * (p0 + p1)

    gates: list[Gate] = []
    for q in reversed(range(n_qubits)):
        theta, phi = levels[q]
        ctrl = list(range(q + 1, n_qubits))
        gates += multiplexed_rotation(theta, "y", q, ctrl)
        gates += multiplexed_rotation(phi, "z", q, ctrl)
    return CircuitFragment(tuple(gates), n_qubits)


def gate_count_bound(n_qubits: int) -> int:
    """Upper bound on len(synthesize_state_prep(...)) for ``n_qubits``."""
    return 2 * (1 << (n_qubits + 1))

