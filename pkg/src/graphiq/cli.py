"""Command-line entry point: ``graphiq {generate,classify,experiment}``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .classifier import DEFAULT_SHOTS, Decision, TrainingSet, classify_quantum, frobenius_distance, prepare
from .experiments import (
    DEFAULT_SEED,
    ExperimentConfig,
    ExperimentError,
    classify_wrt_single_face,
    run_experiment,
)
from .graphs import STRATEGIES, adjacency_vector, build_graph
from .landmarks import MOUTH_WIDTH, extract_mouth, load_landmarks, select_vertices, synthesize_face, write_landmarks

log = logging.getLogger("graphiq")

CLI_BACKENDS = {"classical": "classical", "quantum-exact": "quantum_exact", "quantum-shots": "quantum_shots"}


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _flatten(groups):
    return [x for g in groups for x in g]


def _default_seed(parser: argparse.ArgumentParser) -> int:
    env = os.environ.get("GRAPHIQ_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        parser.error(f"GRAPHIQ_SEED must be an integer, got {env!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphiq", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write synthetic labelled faces as landmark CSV")
    g.add_argument("--count", type=int, default=20, help="faces per class")
    g.add_argument("--noise", type=float, default=0.03 * MOUTH_WIDTH, help="jitter std-dev in pixels")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)

    c = sub.add_parser("classify", help="classify one (test, sad, happy) item")
    c.add_argument("--data", required=True)
    c.add_argument("--test", type=int, required=True, help="row index of the test face")
    c.add_argument("--sad", type=int, required=True)
    c.add_argument("--happy", type=int, required=True)
    c.add_argument("--strategy", choices=STRATEGIES, default="complete")
    c.add_argument("--backend", choices=list(CLI_BACKENDS), default="classical")
    c.add_argument("--n", type=int, default=20, help="mouth vertices to keep")
    c.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    c.add_argument("--seed", type=int)

    e = sub.add_parser("experiment", help="run the accuracy sweep")
    d = ExperimentConfig()
    e.add_argument("--data", required=True)
    e.add_argument("--out", required=True, help="directory for report.json and report.csv")
    e.add_argument("--n-values", type=_int_list, nargs="+", default=[list(d.n_values)])
    e.add_argument("--subsets", type=int, default=d.subsets_per_n)
    e.add_argument("--test-faces", type=int, default=d.test_faces)
    e.add_argument("--pairs", type=int, default=d.training_pairs)
    e.add_argument("--shots", type=int, default=d.shots)
    e.add_argument("--backend", "--backends", dest="backend", nargs="+", choices=list(CLI_BACKENDS),
                   default=["classical", "quantum-exact"])
    e.add_argument("--strategy", "--strategies", dest="strategy", nargs="+", choices=STRATEGIES,
                   default=list(STRATEGIES))
    e.add_argument("--seed", type=int)
    e.add_argument("--threads", type=int, default=1)
    return p


def cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    faces = [synthesize_face(kind, args.noise, rng) for kind in ("happy", "sad") for _ in range(args.count)]
    write_landmarks(args.out, faces)
    log.info("wrote %d faces to %s", len(faces), args.out)
    return 0


def cmd_classify(args) -> int:
    faces = load_landmarks(args.data)
    for name in ("test", "sad", "happy"):
        idx = getattr(args, name)
        if not 0 <= idx < len(faces):
            raise IndexError(f"--{name} {idx} is out of range for {len(faces)} rows")
    rng = np.random.default_rng(args.seed)
    mouths = {k: extract_mouth(faces[getattr(args, k)]) for k in ("test", "sad", "happy")}
    probe = select_vertices(mouths["test"], args.n, rng)
    positions = [mouths["test"].indices.index(i) for i in probe.indices]
    graphs = {
        k: prepare(adjacency_vector(build_graph(select_vertices(m, positions=positions), args.strategy)))
        for k, m in mouths.items()
    }
    backend = CLI_BACKENDS[args.backend]
    out = {"strategy": args.strategy, "backend": args.backend, "n": args.n, "vertices": list(probe.indices)}
    if backend == "classical":
        out["decision"] = classify_wrt_single_face(graphs["test"], graphs["sad"], graphs["happy"], backend)
        out["distances"] = {
            k: frobenius_distance(graphs["test"].raw, graphs[k].raw) for k in ("sad", "happy")
        }
    else:
        train = TrainingSet([(graphs["happy"], 1), (graphs["sad"], -1)])
        mode = "exact" if backend == "quantum_exact" else "shots"
        res = classify_quantum(graphs["test"], train, mode, args.shots, np.random.default_rng([args.seed, 1]))
        out["decision"] = {Decision.POSITIVE: "happy", Decision.NEGATIVE: "sad"}.get(res.decision, "unknown")
        out.update(p=res.p_class0, shots_kept=res.shots_kept, shots_total=res.shots_total)
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_experiment(args, config: ExperimentConfig) -> int:
    faces = load_landmarks(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        report = run_experiment(config, faces)
    except ExperimentError as exc:
        if exc.partial is not None:
            (out / "report.partial.json").write_text(exc.partial.to_json())
        raise
    (out / "report.json").write_text(report.to_json())
    (out / "report.csv").write_text(report.to_csv())
    print(report.summary())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    if getattr(args, "seed", None) is None:
        args.seed = _default_seed(parser)

    config = None
    if args.command == "experiment":
        try:
            config = ExperimentConfig(
                n_values=tuple(_flatten(args.n_values)),
                subsets_per_n=args.subsets,
                test_faces=args.test_faces,
                training_pairs=args.pairs,
                shots=args.shots,
                backends=tuple(CLI_BACKENDS[b] for b in args.backend),
                strategies=tuple(args.strategy),
                seed=args.seed,
                threads=args.threads,
            )
        except ValueError as exc:
            parser.error(str(exc))
    elif args.command == "generate" and (args.count < 1 or not args.noise >= 0):
        parser.error("--count must be >= 1 and --noise >= 0")
    elif args.command == "classify" and (not 3 <= args.n <= 20 or args.shots < 1):
        parser.error("--n must lie in [3, 20] and --shots >= 1")

    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "classify":
            return cmd_classify(args)
        return cmd_experiment(args, config)
    except Exception as exc:  # noqa: BLE001 - report and exit non-zero
        print(f"graphiq: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
