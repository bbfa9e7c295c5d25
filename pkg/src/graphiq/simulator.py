"""Dense statevector simulation over named qubit registers.

Amplitude index convention: qubit ``q`` is bit ``q`` of the basis-state
index (least-significant qubit first).  Registers are contiguous, disjoint
qubit ranges laid out in insertion order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels

__all__ = [
    "Gate",
    "Program",
    "Statevector",
    "Circuit",
    "PostSelectionError",
    "compile_gates",
    "gate_matrix",
    "apply_gate",
    "run",
    "probability",
    "collapse",
    "sample",
    "gates_to_text",
    "gates_from_text",
]

NORM_TOL = 1e-10

_ROTATIONS = frozenset({"RY", "RZ", "U"})
GATE_KINDS = frozenset({"H", "X", "CX"}) | _ROTATIONS

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


class PostSelectionError(RuntimeError):
    """A measurement outcome required for post-selection has probability zero."""


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """2x2 unitary for a gate kind.  ``U`` and ``RY`` share the same matrix."""
    if kind == "H":
        return _H.copy()
    if kind in ("X", "CX"):
        return _X.copy()
    if kind in ("RY", "U"):
        c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array(
            [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=np.complex128
        )
    raise ValueError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class Gate:
    """One single-target gate with optional polarity controls.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 0 is an open
    (anti-) control.  ``CX`` is an ``X`` that must carry at least one control.
    """

    kind: str
    target: int
    angle: float | None = None
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle, got {self.angle!r}")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")
        if self.kind == "CX" and not self.controls:
            raise ValueError("CX needs a control")
        seen = {self.target}
        for q, pol in self.controls:
            if q in seen:
                raise ValueError(f"qubit {q} used twice in {self.kind} gate")
            if pol not in (0, 1):
                raise ValueError(f"control polarity must be 0 or 1, got {pol!r}")
            seen.add(q)
        if min(seen) < 0:
            raise ValueError("negative qubit index")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.angle)

    def with_controls(self, extra: Iterable[tuple[int, int]]) -> "Gate":
        return Gate(self.kind, self.target, self.angle, self.controls + tuple(extra))

    def shifted(self, offset: int) -> "Gate":
        return Gate(
            self.kind,
            self.target + offset,
            self.angle,
            tuple((q + offset, p) for q, p in self.controls),
        )

    def to_text(self) -> str:
        parts = [self.kind, f"q={self.target}"]
        if self.controls:
            parts.append("ctrl=" + ",".join(f"{q}:{p}" for q, p in self.controls))
        if self.angle is not None:
            parts.append(f"theta={self.angle!r}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, line: str) -> "Gate":
        kind, *fields = line.split()
        kw = dict(f.split("=", 1) for f in fields)
        controls = ()
        if "ctrl" in kw:
            controls = tuple(
                (int(q), int(p)) for q, p in (c.split(":") for c in kw["ctrl"].split(","))
            )
        angle = float(kw["theta"]) if "theta" in kw else None
        return cls(kind, int(kw["q"]), angle, controls)


def gates_to_text(gates: Iterable[Gate]) -> str:
    return "".join(g.to_text() + "\n" for g in gates)


def gates_from_text(text: str) -> list[Gate]:
    return [Gate.from_text(ln) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


class Program(NamedTuple):
    """Flat-array form of a gate list, as consumed by the kernels."""

    mats: np.ndarray  # (G, 2, 2) complex128
    targets: np.ndarray  # (G,) int64
    cmasks: np.ndarray
    cvals: np.ndarray

    def __len__(self) -> int:
        return self.mats.shape[0]

    def controlled(self, offset: int, cmask: int, cval: int) -> "Program":
        """Shift every qubit by ``offset`` and add the given control bits."""
        return Program(
            self.mats,
            self.targets + offset,
            (self.cmasks << offset) | cmask,
            (self.cvals << offset) | cval,
        )

    @staticmethod
    def concat(parts: Sequence["Program"]) -> "Program":
        if not parts:
            return compile_gates(())
        return Program(*(np.concatenate(cols) for cols in zip(*parts)))


def _masks(controls) -> tuple[int, int]:
    cmask = cval = 0
    for q, pol in controls:
        cmask |= 1 << q
        cval |= pol << q
    return cmask, cval


def compile_gates(gates: Iterable[Gate]) -> Program:
    gates = list(gates)
    mats = np.empty((len(gates), 2, 2), dtype=np.complex128)
    targets = np.empty(len(gates), dtype=np.int64)
    cmasks = np.empty(len(gates), dtype=np.int64)
    cvals = np.empty(len(gates), dtype=np.int64)
    for i, g in enumerate(gates):
        mats[i] = g.matrix()
        targets[i] = g.target
        cmasks[i], cvals[i] = _masks(g.controls)
    return Program(mats, targets, cmasks, cvals)


class Statevector:
    """Dense state of ``num_qubits`` qubits.  Treated as an immutable value."""

    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes, num_qubits: int | None = None):
        amps = np.array(amplitudes, dtype=np.complex128)
        if num_qubits is None:
            num_qubits = int(amps.shape[0]).bit_length() - 1
        if amps.ndim != 1 or amps.shape[0] != 1 << num_qubits:
            raise ValueError(f"expected {1 << num_qubits} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        self.amplitudes = amps
        self.num_qubits = num_qubits

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"Statevector(num_qubits={self.num_qubits})"


class Circuit:
    """Gate sequence over named registers.

    Fragments appended with :meth:`append_fragment` are stored unexpanded so
    that compiling the circuit only shifts and masks their cached programs.
    """

    def __init__(self, registers: Mapping[str, int] | Sequence[tuple[str, int]] = ()):
        items = registers.items() if isinstance(registers, Mapping) else registers
        self.registers: dict[str, range] = {}
        start = 0
        for name, size in items:
            if size < 0 or name in self.registers:
                raise ValueError(f"bad register {name!r} of size {size}")
            self.registers[name] = range(start, start + size)
            start += size
        self.num_qubits = start
        self._segments: list = []
        self._program: Program | None = None

    def __getitem__(self, name: str) -> range:
        return self.registers[name]

    def _check(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate.qubits)
        self._segments.append(gate)
        self._program = None
        return self

    def append_fragment(self, fragment, offset: int, controls: Sequence[tuple[int, int]] = ()) -> "Circuit":
        """Append ``fragment`` (anything with ``gates``, ``num_qubits`` and
        ``program()``) on qubits ``offset..offset+num_qubits-1``, with every
        gate additionally conditioned on ``controls``."""
        span = range(offset, offset + fragment.num_qubits)
        self._check(span)
        self._check(q for q, _ in controls)
        if any(q in span for q, _ in controls):
            raise ValueError("control qubit overlaps fragment qubits")
        self._segments.append((fragment, offset, tuple(controls)))
        self._program = None
        return self

    @property
    def gates(self) -> list[Gate]:
        out: list[Gate] = []
        for seg in self._segments:
            if isinstance(seg, Gate):
                out.append(seg)
            else:
                frag, offset, controls = seg
                out.extend(g.shifted(offset).with_controls(controls) for g in frag.gates)
        return out

    def __len__(self) -> int:
        return sum(1 if isinstance(s, Gate) else len(s[0].gates) for s in self._segments)

    def program(self) -> Program:
        if self._program is None:
            parts = []
            pending: list[Gate] = []
            for seg in self._segments:
                if isinstance(seg, Gate):
                    pending.append(seg)
                    continue
                if pending:
                    parts.append(compile_gates(pending))
                    pending = []
                frag, offset, controls = seg
                parts.append(frag.program().controlled(offset, *_masks(controls)))
            if pending:
                parts.append(compile_gates(pending))
            self._program = Program.concat(parts)
        return self._program

    def to_text(self) -> str:
        head = "".join(f"# register {k} {r.start} {len(r)}\n" for k, r in self.registers.items())
        return head + gates_to_text(self.gates)


def _check_qubit(state: Statevector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.num_qubits}-qubit state")


def _check_norm(amps: np.ndarray) -> None:
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > NORM_TOL:
        raise FloatingPointError(f"state norm drifted to {norm!r}")


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    for q in gate.qubits:
        _check_qubit(state, q)
    amps = state.amplitudes.copy()
    cmask, cval = _masks(gate.controls)
    _kernels.apply_matrix(amps, gate.matrix(), gate.target, cmask, cval)
    _check_norm(amps)
    return Statevector(amps, state.num_qubits)


def run(circuit: Circuit, initial: Statevector | None = None) -> Statevector:
    """Apply every gate of ``circuit`` to ``initial`` (default ``|0...0>``)."""
    if initial is None:
        amps = np.zeros(1 << circuit.num_qubits, dtype=np.complex128)
        amps[0] = 1.0
    else:
        if initial.num_qubits != circuit.num_qubits:
            raise ValueError("initial state size does not match circuit")
        amps = initial.amplitudes.copy()
    prog = circuit.program()
    if len(prog):
        _kernels.apply_program(amps, *prog)
    _check_norm(amps)
    return Statevector(amps, circuit.num_qubits)


def _bit_mask(state: Statevector, qubit: int, outcome: int) -> np.ndarray:
    idx = np.arange(state.amplitudes.shape[0])
    return ((idx >> qubit) & 1) == outcome


def probability(state: Statevector, qubit: int, outcome: int) -> float:
    _check_qubit(state, qubit)
    p = float(np.sum(np.abs(state.amplitudes[_bit_mask(state, qubit, outcome)]) ** 2))
    return min(max(p, 0.0), 1.0)


def collapse(state: Statevector, qubit: int, outcome: int) -> Statevector:
    """Project ``qubit`` onto ``outcome`` and renormalise."""
    _check_qubit(state, qubit)
    keep = _bit_mask(state, qubit, outcome)
    amps = np.where(keep, state.amplitudes, 0.0)
    p = float(np.sum(np.abs(amps) ** 2))
    if p <= 0.0:
        raise PostSelectionError(f"outcome {outcome} on qubit {qubit} has probability 0")
    return Statevector(amps / math.sqrt(p), state.num_qubits)


def sample(
    state: Statevector, qubits: Sequence[int], shots: int, rng: np.random.Generator
) -> dict[str, int]:
    """Measure ``qubits`` jointly ``shots`` times.

    Keys are bitstrings whose k-th character is the outcome of ``qubits[k]``.
    Only outcomes that occurred are present.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    for q in qubits:
        _check_qubit(state, q)
    idx = np.arange(state.amplitudes.shape[0])
    outcome = np.zeros_like(idx)
    for k, q in enumerate(qubits):
        outcome |= ((idx >> q) & 1) << k
    probs = np.bincount(outcome, weights=np.abs(state.amplitudes) ** 2, minlength=1 << len(qubits))
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    counts = rng.multinomial(shots, probs)
    hist = {}
    for value in np.flatnonzero(counts):
        key = "".join(str((int(value) >> k) & 1) for k in range(len(qubits)))
        hist[key] = int(counts[value])
    return dict(sorted(hist.items()))
