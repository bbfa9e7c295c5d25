"""Evaluation protocol: items, single-face and whole-set accuracies, sweeps.

An *item* is ``(test, sad, happy)``.  One experiment draws ``test_faces``
test faces and ``training_pairs`` distinct (sad, happy) pairs from the
remaining faces once; for every vertex count ``n`` it then draws
``subsets_per_n`` mouth-vertex subsets shared by all strategies and backends
and classifies every item under each of them.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classifier import (
    DEFAULT_SHOTS,
    CLASSICAL_TIE_TOL,
    Decision,
    EncodedGraph,
    TrainingSet,
    build_classifier_circuit,
    decide,
    frobenius_distance,
    prepare,
    shot_class_probability,
)
from .graphs import STRATEGIES, adjacency_vector, build_graph
from .landmarks import FACE_POINTS, MOUTH_INDICES, Expression, PointCloud, draw_vertex_positions, extract_mouth, select_vertices
from .simulator import collapse, probability, run

log = logging.getLogger(__name__)

__all__ = [
    "BACKENDS",
    "DEFAULT_SEED",
    "UNKNOWN",
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentError",
    "classify_wrt_single_face",
    "classify_wrt_whole_set",
    "accuracy_wrt_single_face",
    "accuracy_whole_set",
    "draw_items",
    "run_experiment",
]

BACKENDS = ("classical", "quantum_exact", "quantum_shots", "classical_normalized")
QUANTUM_BACKENDS = ("quantum_exact", "quantum_shots")
DEFAULT_SEED = 20210
UNKNOWN = "unknown"
HAPPY, SAD = Expression.HAPPY.value, Expression.SAD.value


class ExperimentError(RuntimeError):
    """An item failed; ``partial`` holds the report rows finished so far."""

    def __init__(self, message: str, partial: "ExperimentReport | None" = None):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# single items
# ---------------------------------------------------------------------------


def _distance_decision(d_sad: float, d_happy: float) -> str:
    diff = d_sad - d_happy
    if abs(diff) < CLASSICAL_TIE_TOL:
        return UNKNOWN
    return HAPPY if diff > 0 else SAD


def _quantum_p(test: EncodedGraph, sad: EncodedGraph, happy: EncodedGraph, backend: str, shots: int, rng):
    train = TrainingSet([(happy, 1), (sad, -1)])
    circ = build_classifier_circuit(test, train)
    state = run(circ)
    a, c = circ["a"][0], circ["c"][0]
    if backend == "quantum_shots":
        return shot_class_probability(state, a, c, shots, rng)[0]
    return probability(collapse(state, a, 0), c, 0)


def _label_of(decision: Decision) -> str:
    return {Decision.POSITIVE: HAPPY, Decision.NEGATIVE: SAD}.get(decision, UNKNOWN)


def classify_wrt_single_face(
    test, sad, happy, backend: str = "classical", *, shots: int = DEFAULT_SHOTS, rng=None
) -> str:
    """'happy', 'sad' or 'unknown' for one item.

    Classical backends compare ``d(test, sad) - d(test, happy)`` against the
    0.001 tie threshold; quantum backends threshold the class-0 probability.
    """
    test, sad, happy = prepare(test), prepare(sad), prepare(happy)
    if backend == "classical":
        return _distance_decision(frobenius_distance(test.raw, sad.raw), frobenius_distance(test.raw, happy.raw))
    if backend == "classical_normalized":
        return _distance_decision(
            frobenius_distance(test.amplitudes, sad.amplitudes),
            frobenius_distance(test.amplitudes, happy.amplitudes),
        )
    if backend in QUANTUM_BACKENDS:
        if backend == "quantum_shots" and rng is None:
            raise ValueError("quantum_shots needs an rng")
        return _label_of(decide(_quantum_p(test, sad, happy, backend, shots, rng)))
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def classify_wrt_whole_set(decisions: Sequence[str]) -> str:
    """Majority vote over the single-face decisions for one test graph.

    Anything other than 'happy' (including 'unknown') counts toward sad;
    equal counters give 'unknown'.
    """
    happy = sum(1 for d in decisions if d == HAPPY)
    sad = len(decisions) - happy
    if happy == sad:
        return UNKNOWN
    return HAPPY if happy > sad else SAD


# ---------------------------------------------------------------------------
# accuracy over a test set
# ---------------------------------------------------------------------------


def decision_matrix(tests, pairs, classify: Callable[[int, int], str]) -> list[list[str]]:
    return [[classify(t, p) for p in range(len(pairs))] for t in range(len(tests))]


def _matrix_for(tests, pairs, backend, shots, rng_for):
    def classify(t, p):
        rng = rng_for(t * len(pairs) + p) if backend == "quantum_shots" else None
        sad, happy = pairs[p]
        return classify_wrt_single_face(tests[t][0], sad, happy, backend, shots=shots, rng=rng)

    return decision_matrix(tests, pairs, classify)


def _single_from_matrix(matrix, labels) -> tuple[int, int]:
    correct = sum(d == lab for row, lab in zip(matrix, labels) for d in row)
    total = sum(len(row) for row in matrix)
    return correct, total - correct


def _whole_from_matrix(matrix, labels) -> tuple[int, int]:
    correct = sum(classify_wrt_whole_set(row) == lab for row, lab in zip(matrix, labels))
    return correct, len(matrix) - correct


def _check_inputs(tests, pairs):
    if not tests:
        raise ValueError("no test graphs")
    if not pairs:
        raise ValueError("no (sad, happy) training pairs")


def _default_rng_for(seed):
    return lambda item: np.random.default_rng([seed, item])


def accuracy_wrt_single_face(
    tests: Sequence[tuple[object, str]],
    pairs: Sequence[tuple[object, object]],
    backend: str = "classical",
    *,
    shots: int = DEFAULT_SHOTS,
    seed: int = DEFAULT_SEED,
) -> float:
    """correct / (correct + wrong) over every (test, pair) item; unknown is wrong."""
    _check_inputs(tests, pairs)
    labels = [str(Expression(lab)) for _, lab in tests]
    matrix = _matrix_for(tests, pairs, backend, shots, _default_rng_for(seed))
    correct, wrong = _single_from_matrix(matrix, labels)
    return correct / (correct + wrong)


def accuracy_whole_set(
    tests: Sequence[tuple[object, str]],
    pairs: Sequence[tuple[object, object]],
    backend: str = "classical",
    *,
    shots: int = DEFAULT_SHOTS,
    seed: int = DEFAULT_SEED,
) -> float:
    """Fraction of test graphs whose majority vote matches their label."""
    _check_inputs(tests, pairs)
    labels = [str(Expression(lab)) for _, lab in tests]
    matrix = _matrix_for(tests, pairs, backend, shots, _default_rng_for(seed))
    correct, wrong = _whole_from_matrix(matrix, labels)
    return correct / (correct + wrong)


# ---------------------------------------------------------------------------
# full protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...] = tuple(range(4, 21, 2))
    subsets_per_n: int = 20
    test_faces: int = 10
    training_pairs: int = 25
    shots: int = DEFAULT_SHOTS
    backends: tuple[str, ...] = ("classical", "quantum_exact")
    strategies: tuple[str, ...] = STRATEGIES
    seed: int = DEFAULT_SEED
    threads: int = 1

    def __post_init__(self):
        for name in ("subsets_per_n", "test_faces", "training_pairs", "shots", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.n_values or not all(3 <= n <= len(MOUTH_INDICES) for n in self.n_values):
            raise ValueError(f"n_values must lie in [3, {len(MOUTH_INDICES)}], got {self.n_values}")
        for b in self.backends:
            if b not in BACKENDS:
                raise ValueError(f"unknown backend {b!r}")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        if not self.backends or not self.strategies:
            raise ValueError("need at least one backend and one strategy")


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[dict] = field(default_factory=list)

    CSV_COLUMNS = (
        "n", "strategy", "backend",
        "single_mean", "single_min", "single_max",
        "whole_mean", "whole_min", "whole_max",
        "unknown_rate", "item_count",
    )

    def row(self, n: int, strategy: str, backend: str) -> dict:
        for r in self.rows:
            if (r["n"], r["strategy"], r["backend"]) == (n, strategy, backend):
                return r
        raise KeyError((n, strategy, backend))

    def to_json(self) -> str:
        cfg = asdict(self.config)
        cfg.pop("threads")
        return json.dumps({"config": cfg, "rows": self.rows}, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r[c] if isinstance(r[c], (int, str)) else f"{r[c]:.6f}" for c in self.CSV_COLUMNS])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{'n':>3} {'strategy':<9} {'backend':<20} {'single':>7} {'whole':>7} {'unknown':>8}"]
        for r in self.rows:
            lines.append(
                f"{r['n']:>3} {r['strategy']:<9} {r['backend']:<20} "
                f"{r['single_mean']:>7.3f} {r['whole_mean']:>7.3f} {r['unknown_rate']:>8.3f}"
            )
        return "\n".join(lines)


def _mouths(dataset: Sequence[PointCloud]) -> list[PointCloud]:
    out = []
    for face in dataset:
        if len(face) == FACE_POINTS:
            out.append(extract_mouth(face))
        elif len(face) == len(MOUTH_INDICES):
            out.append(face)
        else:
            raise ValueError(f"expected {FACE_POINTS}-point faces or mouths, got {len(face)} points")
    return out


def draw_items(labels: Sequence[str], test_faces: int, training_pairs: int, rng: np.random.Generator):
    """Pick test face indices and distinct (sad, happy) index pairs from the rest."""
    labels = [str(Expression(lab)) for lab in labels]
    if test_faces >= len(labels):
        raise ValueError(f"{test_faces} test faces leave no training faces out of {len(labels)}")
    tests = sorted(int(i) for i in rng.choice(len(labels), size=test_faces, replace=False))
    rest = [i for i in range(len(labels)) if i not in set(tests)]
    sad = [i for i in rest if labels[i] == SAD]
    happy = [i for i in rest if labels[i] == HAPPY]
    if not sad or not happy:
        raise ValueError("training pool must contain both happy and sad faces")
    if training_pairs > len(sad) * len(happy):
        raise ValueError(f"only {len(sad) * len(happy)} distinct training pairs available, need {training_pairs}")
    flat = rng.choice(len(sad) * len(happy), size=training_pairs, replace=False)
    pairs = [(sad[k // len(happy)], happy[k % len(happy)]) for k in sorted(int(k) for k in flat)]
    return tests, pairs


def _unit(mouths, labels, tests, pairs, positions, strategy, backends, cfg, n, subset):
    """Decision matrices for every backend under one vertex subset and strategy."""
    needed = sorted(set(tests) | {i for p in pairs for i in p})
    graphs: dict[int, EncodedGraph] = {}
    for i in needed:
        try:
            cloud = select_vertices(mouths[i], positions=positions)
            graphs[i] = prepare(adjacency_vector(build_graph(cloud, strategy)))
        except Exception as exc:
            raise ExperimentError(f"n={n} subset={subset} strategy={strategy} face={i}: {exc}") from exc

    out = {}
    states = {}
    for backend in backends:
        matrix = []
        for ti, t in enumerate(tests):
            row = []
            for pi, (s, h) in enumerate(pairs):
                item = ti * len(pairs) + pi
                try:
                    if backend in QUANTUM_BACKENDS:
                        if item not in states:
                            train = TrainingSet([(graphs[h], 1), (graphs[s], -1)])
                            circ = build_classifier_circuit(graphs[t], train)
                            states[item] = (run(circ), circ["a"][0], circ["c"][0])
                        state, a, c = states[item]
                        if backend == "quantum_exact":
                            p = probability(collapse(state, a, 0), c, 0)
                        else:
                            rng = np.random.default_rng([cfg.seed, n, subset, item])
                            p = shot_class_probability(state, a, c, cfg.shots, rng)[0]
                        row.append(_label_of(decide(p)))
                    else:
                        row.append(classify_wrt_single_face(graphs[t], graphs[s], graphs[h], backend))
                except ExperimentError:
                    raise
                except Exception as exc:
                    raise ExperimentError(
                        f"n={n} subset={subset} strategy={strategy} backend={backend} "
                        f"item={item} (test={t}, sad={s}, happy={h}): {exc}"
                    ) from exc
            matrix.append(row)
        out[backend] = matrix
    return out


def _summarise(values: Sequence[float]) -> tuple[float, float, float]:
    return float(np.mean(values)), float(np.min(values)), float(np.max(values))


def run_experiment(config: ExperimentConfig, dataset: Sequence[PointCloud]) -> ExperimentReport:
    """Run the protocol over every (n, strategy, backend) cell of ``config``."""
    mouths = _mouths(dataset)
    labels = [str(m.label) for m in mouths]
    tests, pairs = draw_items(labels, config.test_faces, config.training_pairs, np.random.default_rng([config.seed, 0]))
    test_labels = [labels[t] for t in tests]

    units = []
    for n in config.n_values:
        rng = np.random.default_rng([config.seed, 1, n])
        subsets = [draw_vertex_positions(n, rng) for _ in range(config.subsets_per_n)]
        for s, positions in enumerate(subsets):
            for strategy in config.strategies:
                units.append((n, s, positions, strategy))

    # identical subsets give identical results for deterministic backends
    memo: dict = {}

    def work(unit):
        n, s, positions, strategy = unit
        det = tuple(b for b in config.backends if b != "quantum_shots")
        key = (positions, strategy)
        if key in memo:
            cached = memo[key]
            todo = tuple(b for b in config.backends if b not in cached)
        else:
            cached, todo = {}, config.backends
        result = dict(cached)
        result.update(_unit(mouths, labels, tests, pairs, positions, strategy, todo, config, n, s) if todo else {})
        memo.setdefault(key, {b: result[b] for b in det})
        return result

    report = ExperimentReport(config)
    results = []
    try:
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                for res in pool.map(work, units):
                    results.append(res)
        else:
            for unit in units:
                results.append(work(unit))
    except ExperimentError as exc:
        exc.partial = _reduce(report, config, units[: len(results)], results, test_labels, len(tests) * len(pairs))
        raise
    return _reduce(report, config, units, results, test_labels, len(tests) * len(pairs))


def _reduce(report, config, units, results, test_labels, item_count):
    cells: dict = {}
    for (n, s, _, strategy), res in zip(units, results):
        for backend, matrix in res.items():
            sc, sw = _single_from_matrix(matrix, test_labels)
            wc, ww = _whole_from_matrix(matrix, test_labels)
            unknown = sum(d == UNKNOWN for row in matrix for d in row)
            cell = cells.setdefault((n, strategy, backend), {"single": [], "whole": [], "unknown": 0, "count": 0})
            cell["single"].append(sc / (sc + sw))
            cell["whole"].append(wc / (wc + ww))
            cell["unknown"] += unknown
            cell["count"] += sc + sw
    rows = []
    for n in config.n_values:
        for strategy in config.strategies:
            for backend in config.backends:
                cell = cells.get((n, strategy, backend))
                if cell is None:
                    continue
                sm, smin, smax = _summarise(cell["single"])
                wm, wmin, wmax = _summarise(cell["whole"])
                rows.append({
                    "n": n, "strategy": strategy, "backend": backend,
                    "single_mean": sm, "single_min": smin, "single_max": smax,
                    "whole_mean": wm, "whole_min": wmin, "whole_max": wmax,
                    "unknown_rate": cell["unknown"] / cell["count"],
                    "item_count": item_count,
                    "subsets": len(cell["single"]),
                })
    report.rows = rows
    return report
