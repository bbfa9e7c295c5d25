"""Interference-based distance classifier and its classical baseline.

Register layout (least-significant first): ancilla ``a`` | index ``m`` |
graph ``g`` | class ``c``.  Class qubit value 0 stands for label +1.

Before the last Hadamard the circuit holds

    1/sqrt(2M) sum_m (|0>_a |test> + |1>_a |G_m>) |m>_m |y_m>_c

so after post-selecting ``a = 0`` the class qubit reads 0 with probability

    sum_{m: y_m=+1} |test + G_m|^2  /  sum_m |test + G_m|^2

with every graph state unit-normalised.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .encoding import AmplitudeVector, CircuitFragment, encode, qubits_for, synthesize_state_prep
from .simulator import (
    Circuit,
    Gate,
    PostSelectionError,
    Statevector,
    collapse,
    probability,
    run,
    sample,
)

__all__ = [
    "Decision",
    "EncodedGraph",
    "TrainingSet",
    "ClassificationOutcome",
    "prepare",
    "build_classifier_circuit",
    "closed_form_probability",
    "ancilla_zero_probability",
    "exact_class_probability",
    "shot_class_probability",
    "classify_quantum",
    "frobenius_distance",
    "classify_classical",
    "decide",
    "QUANTUM_TIE_BAND",
    "CLASSICAL_TIE_TOL",
    "DEFAULT_SHOTS",
]

QUANTUM_TIE_BAND = 0.0005
CLASSICAL_TIE_TOL = 0.001
DEFAULT_SHOTS = 1024
AGREEMENT_TOL = 1e-10


class Decision(enum.IntEnum):
    NEGATIVE = -1
    UNKNOWN = 0
    POSITIVE = 1

    def __str__(self) -> str:
        return {1: "+1", -1: "-1", 0: "unknown"}[int(self)]


@dataclass(frozen=True, eq=False)
class EncodedGraph:
    """A graph's raw adjacency entries together with its amplitude state."""

    raw: np.ndarray
    state: AmplitudeVector

    @cached_property
    def fragment(self) -> CircuitFragment:
        return synthesize_state_prep(self.state)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.state.amplitudes


def prepare(vec) -> EncodedGraph:
    """Accepts an AdjacencyVector, a raw 1-D array, an AmplitudeVector or an EncodedGraph."""
    if isinstance(vec, EncodedGraph):
        return vec
    if isinstance(vec, AmplitudeVector):
        return EncodedGraph(np.asarray(vec.amplitudes[: vec.dim]), vec)
    raw = np.asarray(getattr(vec, "entries", vec), dtype=np.float64)
    return EncodedGraph(raw, encode(raw))


class TrainingSet:
    """Labelled training graphs; labels are +1 or -1 and both must occur."""

    def __init__(self, members: Sequence[tuple[object, int]]):
        prepared = []
        for vec, label in members:
            if label not in (1, -1):
                raise ValueError(f"labels must be +1 or -1, got {label!r}")
            prepared.append((prepare(vec), int(label)))
        if len(prepared) < 2:
            raise ValueError("need at least two training graphs")
        labels = {y for _, y in prepared}
        if labels != {1, -1}:
            raise ValueError("training set must contain both labels")
        if len({g.raw.shape[0] for g, _ in prepared}) != 1:
            raise ValueError("training graphs differ in size")
        self.members: tuple[tuple[EncodedGraph, int], ...] = tuple(prepared)

    @property
    def M(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClassificationOutcome:
    p_class0: float
    decision: Decision
    mode: str
    shots_kept: int = 0
    shots_total: int = 0

    def to_dict(self) -> dict:
        return {
            "p": self.p_class0,
            "decision": str(self.decision),
            "mode": self.mode,
            "shots_kept": self.shots_kept,
            "shots_total": self.shots_total,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_sizes(test: EncodedGraph, train: TrainingSet) -> None:
    for g, _ in train:
        if len(g.state) != len(test.state) or g.raw.shape != test.raw.shape:
            raise ValueError(
                f"test graph ({test.raw.shape[0]} entries) and training graph "
                f"({g.raw.shape[0]} entries) do not match"
            )


def build_classifier_circuit(test, train: TrainingSet) -> Circuit:
    test = prepare(test)
    _check_sizes(test, train)
    M = train.M
    n_g = test.state.num_qubits
    circ = Circuit([("a", 1), ("m", qubits_for(M)), ("g", n_g), ("c", 1)])
    a = circ["a"][0]
    m_reg = list(circ["m"])
    g0 = circ["g"].start
    c = circ["c"][0]

    circ.append(Gate("H", a))
    if M == 2:
        m = m_reg[0]
        circ.append(Gate("H", m))
        circ.append_fragment(test.fragment, g0, [(a, 1)])
        circ.append(Gate("X", a))
        circ.append_fragment(train.members[0][0].fragment, g0, [(a, 1), (m, 1)])
        circ.append(Gate("X", m))
        circ.append_fragment(train.members[1][0].fragment, g0, [(a, 1), (m, 1)])
    else:
        uniform = np.zeros(1 << len(m_reg))
        uniform[:M] = 1.0 / math.sqrt(M)
        circ.append_fragment(synthesize_state_prep(uniform), m_reg[0])
        circ.append_fragment(test.fragment, g0, [(a, 0)])
        for idx, (g, _) in enumerate(train):
            ctrl = [(a, 1)] + [(q, (idx >> b) & 1) for b, q in enumerate(m_reg)]
            circ.append_fragment(g.fragment, g0, ctrl)
    # class qubit: flip for every index whose label is -1
    for idx, (_, y) in enumerate(train):
        if y == -1:
            ctrl = tuple((q, (idx >> b) & 1) for b, q in enumerate(m_reg))
            circ.append(Gate("CX", c, None, ctrl))
    circ.append(Gate("H", a))
    return circ


def _branch_norms(test: EncodedGraph, train: TrainingSet) -> np.ndarray:
    t = test.amplitudes
    return np.array([np.sum(np.abs(t + g.amplitudes) ** 2) for g, _ in train])


def closed_form_probability(test, train: TrainingSet) -> float:
    """p(c = 0 | a = 0) from the normalised states directly.

    Equivalent to ``sum_{+1}(4 - d^2) / sum_m (4 - d^2)`` with ``d`` the
    distance between unit-normalised test and training states.
    """
    test = prepare(test)
    _check_sizes(test, train)
    s = _branch_norms(test, train)
    total = float(s.sum())
    if total <= 0.0:
        raise PostSelectionError("ancilla can never read 0 for this input")
    pos = float(sum(v for v, (_, y) in zip(s, train) if y == 1))
    return pos / total


def ancilla_zero_probability(test, train: TrainingSet) -> float:
    """Probability that the ancilla reads 0, from the closed form."""
    test = prepare(test)
    return float(_branch_norms(test, train).sum()) / (4.0 * train.M)


def _simulate(test: EncodedGraph, train: TrainingSet) -> tuple[Circuit, Statevector]:
    circ = build_classifier_circuit(test, train)
    return circ, run(circ)


def exact_class_probability(test, train: TrainingSet, *, check: bool = True) -> float:
    """Post-selected class-0 probability from the simulated circuit.

    With ``check`` the result is compared against :func:`closed_form_probability`.
    """
    test = prepare(test)
    circ, state = _simulate(test, train)
    a, c = circ["a"][0], circ["c"][0]
    if probability(state, a, 0) <= 0.0:
        raise PostSelectionError("ancilla-0 branch has probability 0")
    p = probability(collapse(state, a, 0), c, 0)
    if check:
        ref = closed_form_probability(test, train)
        if abs(p - ref) > AGREEMENT_TOL:
            raise ArithmeticError(f"circuit p={p!r} disagrees with closed form {ref!r}")
    return p


def shot_class_probability(
    state: Statevector, ancilla: int, cls: int, shots: int, rng: np.random.Generator
) -> tuple[float, int]:
    """Estimate p(c=0 | a=0) from ``shots`` joint measurements of (a, c).

    Shots where the ancilla reads 1 are discarded, not repeated.
    Returns ``(p, kept)``.
    """
    hist = sample(state, [ancilla, cls], shots, rng)
    kept = hist.get("00", 0) + hist.get("01", 0)
    if kept == 0:
        raise PostSelectionError(f"all {shots} shots discarded by ancilla post-selection")
    return hist.get("00", 0) / kept, kept


def decide(p: float, band: float = QUANTUM_TIE_BAND) -> Decision:
    if p > 0.5 + band:
        return Decision.POSITIVE
    if p < 0.5 - band:
        return Decision.NEGATIVE
    return Decision.UNKNOWN


def classify_quantum(
    test,
    train: TrainingSet,
    mode: str = "exact",
    shots: int = DEFAULT_SHOTS,
    rng: np.random.Generator | None = None,
) -> ClassificationOutcome:
    test = prepare(test)
    if mode == "exact":
        p = exact_class_probability(test, train)
        return ClassificationOutcome(p, decide(p), "exact")
    if mode != "shots":
        raise ValueError(f"mode must be 'exact' or 'shots', got {mode!r}")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if rng is None:
        raise ValueError("shots mode needs an rng")
    circ, state = _simulate(test, train)
    p, kept = shot_class_probability(state, circ["a"][0], circ["c"][0], shots, rng)
    return ClassificationOutcome(p, decide(p), "shots", kept, shots)


def frobenius_distance(g1, g2) -> float:
    """Euclidean distance between two adjacency vectors (each pair counted once).

    The Frobenius norm of the difference of the full symmetric matrices is
    ``sqrt(2)`` times this value.
    """
    a = np.asarray(getattr(g1, "entries", g1), dtype=np.float64)
    b = np.asarray(getattr(g2, "entries", g2), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def classify_classical(
    test, train: TrainingSet, tie_tol: float = CLASSICAL_TIE_TOL, normalized: bool = False
) -> Decision:
    """``-sgn(sum_m y_m d(test, G_m))`` on raw (or, with ``normalized``, unit) vectors."""
    test = prepare(test)
    pick = (lambda e: e.amplitudes) if normalized else (lambda e: e.raw)
    s = sum(y * frobenius_distance(pick(test), pick(g)) for g, y in train)
    if abs(s) < tie_tol:
        return Decision.UNKNOWN
    return Decision.NEGATIVE if s > 0 else Decision.POSITIVE
