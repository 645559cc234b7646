"""Command-line front end: ``vslam <command> ...``.

Exit codes: 0 ok, 1 plan not valid, 2 syntax/parse error, 3 semantic or type
error, 4 collapsed version space, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import __version__
from .core import Demonstration, FluentUniverse, GroundModel
from .errors import (
    CollapsedSpace,
    MalformedRecord,
    PDDLSyntaxError,
    PDDLTypeError,
    SchemaMismatch,
    UnknownAction,
    UnsupportedFeature,
    VslamError,
)
from .evaluation import DEFAULT_RATIOS, learning_curve, score, write_curve_csv
from .extract import (
    ND_FORMAT,
    PlanningQuery,
    export_pddl,
    extract_complete,
    extract_sound,
    nd_from_json,
    nd_to_json,
    pddl_action_name,
    validate_plan,
)
from .pddl import fluent_name, ground, load_domain, load_problem
from .simulator import PRNG_NAME, SimConfig, simulate, split
from .traces import MODEL_FORMAT, load_model, model_to_json, read_trace, save_model, write_trace
from .version_space import SNAPSHOT_FORMAT, Learner, from_snapshot, save_snapshot

EXIT_OK, EXIT_INVALID, EXIT_SYNTAX, EXIT_SEMANTIC, EXIT_COLLAPSE, EXIT_IO = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_SYNTAX, f"{path}: line {exc.lineno}, col {exc.colno}: {exc.msg}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _convert(demos: list[Demonstration], src: FluentUniverse, dst: FluentUniverse) -> list[Demonstration]:
    if src == dst:
        return demos
    missing = [f for f in src.fluents if f not in dst]
    if missing or src.n != dst.n:
        raise SchemaMismatch(f"trace and model fluents differ (e.g. {missing[:3]})")

    def move(s):
        return None if s is None else dst.state(src.true_fluents(s))

    return [Demonstration(move(d.pre), d.action, move(d.post)) for d in demos]


# -- commands -------------------------------------------------------------------------


def cmd_ground(args) -> int:
    g = ground(load_domain(args.domain), load_problem(args.problem))
    if args.out:
        save_model(args.out, g.model, g.init, g.goal)
    u = g.universe
    print(f"# {u.n} fluents, {len(g.model.actions)} ground actions, {len(g.dropped)} dropped")
    if args.list_actions:
        for name in sorted(g.model.action_names):
            print(name)
    else:
        for f in u.fluents:
            print(f)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.config:
        cfg = SimConfig.from_file(
            args.config, seed=args.seed, length=args.length, restarts=args.restarts, ratio=args.ratio,
            dedupe=args.dedupe or None,
        )
    else:
        if args.seed is None:
            raise CliError(EXIT_SEMANTIC, "--seed is required")
        cfg = SimConfig(
            seed=args.seed,
            length=20 if args.length is None else args.length,
            restarts=1 if args.restarts is None else args.restarts,
            ratio=0.0 if args.ratio is None else args.ratio,
            dedupe=bool(args.dedupe),
        )
    model, init, _ = load_model(args.model)
    if init is None:
        raise CliError(EXIT_SEMANTIC, f"{args.model} has no initial state")
    demos = simulate(model, init, cfg)
    meta = {"config": cfg.to_dict(), "prng": PRNG_NAME}
    write_trace(args.out, model.universe, model.action_names, demos, meta)
    pos = sum(d.post is not None for d in demos)
    print(f"{pos} positive, {len(demos) - pos} negative demonstrations -> {args.out}")
    return EXIT_OK


def _status_table(learner: Learner) -> str:
    rows = [("action", "pre", "eff", "|U_p|", "pos", "neg", "skipped")]
    for name, vs in learner.spaces.items():
        st = vs.status()
        rows.append((name, st.pre.value, st.eff.value, str(len(vs.pre.upper)), str(vs.positives),
                     str(vs.negatives), str(vs.skipped)))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def cmd_learn(args) -> int:
    trace = read_trace(args.trace)
    learner = Learner(trace.universe, trace.actions, max_upper=args.max_upper, on_collapse="skip")
    learner.feed(trace.demos)
    if args.out:
        save_snapshot(args.out, learner.spaces, trace.universe)
    sys.stdout.write(_status_table(learner))
    collapsed = [a for a, st in learner.status().items() if st.collapsed]
    if collapsed:
        print(f"collapsed: {', '.join(collapsed)}", file=sys.stderr)
        return EXIT_COLLAPSE
    return EXIT_OK


def cmd_extract(args) -> int:
    universe, spaces = from_snapshot(_read_json(args.snapshot))
    if args.kind == "sound":
        model = extract_sound(spaces, universe)
        fmt = args.format or "pddl"
        text = export_pddl(model, args.domain_name) if fmt == "pddl" else json.dumps(model_to_json(model), indent=1) + "\n"
    else:
        if args.format == "pddl":
            raise CliError(EXIT_SEMANTIC, "complete models are exported as JSON only")
        text = json.dumps(nd_to_json(extract_complete(spaces, universe)), indent=1) + "\n"
    _write(args.out, text)
    return EXIT_OK


def _load_models(path: str, kind: str | None) -> list[tuple[str, object]]:
    doc = _read_json(path)
    fmt = doc.get("format")
    if fmt == SNAPSHOT_FORMAT:
        universe, spaces = from_snapshot(doc)
        kinds = [kind] if kind else ["sound", "complete"]
        return [
            (k.upper(), extract_sound(spaces, universe) if k == "sound" else extract_complete(spaces, universe))
            for k in kinds
        ]
    if fmt == ND_FORMAT:
        return [("COMPLETE", nd_from_json(doc))]
    if fmt == MODEL_FORMAT:
        model, _, _ = load_model(path)
        return [("MODEL", model)]
    raise CliError(EXIT_SEMANTIC, f"{path}: unrecognised model format {fmt!r}")


def cmd_eval(args) -> int:
    trace = read_trace(args.trace)
    print("model,tp,fp,fn,tn,precision,recall,f1")
    for name, model in _load_models(args.model, args.kind):
        demos = _convert(trace.demos, trace.universe, model.universe)
        sc = score(model, demos)
        print(f"{name},{sc.tp},{sc.fp},{sc.fn},{sc.tn},"
              f"{float(sc.precision):.6f},{float(sc.recall):.6f},{float(sc.f1):.6f}")
    return EXIT_OK


def cmd_curve(args) -> int:
    model, _, _ = load_model(args.model)
    trace = read_trace(args.trace)
    demos = _convert(trace.demos, trace.universe, model.universe)
    train, test = split(demos, args.fraction, args.seed)
    ratios = [float(r) for r in args.ratios.split(",")] if args.ratios else list(DEFAULT_RATIOS)
    points = learning_curve(model, train, test, ratios, seed=args.seed, every=args.every, dedupe=args.dedupe)
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            write_curve_csv(points, fh)
        print(f"{len(points)} curve points -> {args.out}")
    else:
        write_curve_csv(points, sys.stdout)
    return EXIT_OK


def _read_plan(path: str) -> list[str]:
    steps = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("(") and line.endswith(")"):
            line = line[1:-1]
        steps.append(" ".join(line.lower().split()))
    return steps


def cmd_validate(args) -> int:
    prob = load_problem(args.problem)
    if args.model.endswith(".json"):
        model, _, _ = load_model(args.model)
        u = model.universe
        try:
            init = u.state(fluent_name(a) for a in prob.init)
            goal = u.literals(
                fluent_name(lit.atom) if lit.positive else "!" + fluent_name(lit.atom) for lit in prob.goal
            )
        except KeyError as exc:
            raise CliError(EXIT_SEMANTIC, f"problem mentions {exc.args[0]}") from None
    else:
        g = ground(load_domain(args.model), prob)
        model, init, goal = g.model, g.init, g.goal
    plan = []
    for step in _read_plan(args.plan):
        if step not in model and pddl_action_name(step) in model:
            step = pddl_action_name(step)
        plan.append(step)
    verdict = validate_plan(model, PlanningQuery(init, goal, tuple(plan)))
    print(verdict)
    return EXIT_OK if verdict.valid else EXIT_INVALID


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vslam", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"vslam {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ground", help="ground a PDDL domain/problem into a model file")
    s.add_argument("domain")
    s.add_argument("problem")
    s.add_argument("--out", "-o")
    s.add_argument("--list-actions", action="store_true", help="print the ground action catalogue instead of fluents")
    s.set_defaults(func=cmd_ground)

    s = sub.add_parser("simulate", help="generate demonstrations from a ground model")
    s.add_argument("model")
    s.add_argument("--seed", type=int)
    s.add_argument("--length", type=int)
    s.add_argument("--restarts", type=int)
    s.add_argument("--ratio", type=float, help="negative demonstrations per positive one")
    s.add_argument("--dedupe", action="store_true", help="never repeat a failing (state, action) pair")
    s.add_argument("--config", help="JSON file with SimConfig fields; flags override it")
    s.add_argument("--out", "-o", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("learn", help="learn version spaces from a trace")
    s.add_argument("trace")
    s.add_argument("--out", "-o")
    s.add_argument("--max-upper", type=int, help="cap on the upper precondition boundary size")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("extract", help="extract a sound or complete model from a snapshot")
    s.add_argument("snapshot")
    s.add_argument("--kind", choices=["sound", "complete"], required=True)
    s.add_argument("--format", choices=["pddl", "json"])
    s.add_argument("--domain-name", default="learnt")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("eval", help="score a model on a trace")
    s.add_argument("model", help="snapshot, ground model or non-deterministic model JSON")
    s.add_argument("trace")
    s.add_argument("--kind", choices=["sound", "complete"], help="for snapshots: which model to extract")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("curve", help="learning curves over training prefixes and ratios")
    s.add_argument("model", help="true ground model JSON")
    s.add_argument("trace")
    s.add_argument("--ratios", help="comma-separated, default 0,0.5,1,2,5")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fraction", type=float, default=0.5, help="training share of the split")
    s.add_argument("--every", type=int, default=1, help="emit a point every k positives")
    s.add_argument("--dedupe", action="store_true")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("validate", help="validate a plan against a deterministic model")
    s.add_argument("model", help="ground model JSON or PDDL domain")
    s.add_argument("problem")
    s.add_argument("plan")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        warnings.showwarning = lambda m, c, *_a, **_k: print(f"warning: {m}", file=sys.stderr)
        try:
            return args.func(args)
        except CliError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return exc.code
        except (PDDLSyntaxError, UnsupportedFeature, MalformedRecord) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SYNTAX
        except CollapsedSpace as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_COLLAPSE
        except (PDDLTypeError, SchemaMismatch, UnknownAction, VslamError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SEMANTIC
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
