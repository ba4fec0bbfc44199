"""Command-line surface: every subcommand is a thin shell over one
library call plus document I/O.

Exit codes: 0 success, 1 domain error (bad automaton, cap exceeded,
schema violation, I/O failure), 2 usage error.  Diagnostics go to stderr;
data goes to files or stdout only.  ``equivalent`` follows cmp(1)
conventions: exit 0 when the languages match, 1 when they differ.

Randomized commands require an explicit --seed; there is never an
implicit random seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from ._version import __version__
from .core import StartKind, stats, validate
from .documents import (DocumentError, PatternSet, load_automaton,
                        load_pattern_set, render_trace, save_automaton,
                        save_pattern_set, write_text_atomic,
                        automaton_to_document)
from .experiment import (GrowthThresholds, classify_growth, emit_report,
                         experiment_x_axis, incremental_merge_experiment,
                         per_pattern_experiment)
from .generators import gen_dotstar, gen_mesh_patterns, Pattern, RandomRecipe
from .simulate import active_rule_frequency, run
from .transform import (CapExceededError, DEFAULT_STATE_CAP,
                        connected_components, determinize, equivalent,
                        merge_patterns, minimize_brzozowski,
                        minimize_hopcroft, optimize_nfa)

_START_CHOICES = [k.value for k in StartKind]


def _start_kind(value: str) -> StartKind:
    return StartKind(value)


def _write_automaton(a, out: str | None) -> None:
    if out:
        save_automaton(a, out)
    else:
        json.dump(automaton_to_document(a), sys.stdout, indent=2)
        sys.stdout.write("\n")


def _load_valid(path: str):
    a = load_automaton(path)
    problems = validate(a)
    if problems:
        raise ValueError(f"{path}: invalid automaton: " + "; ".join(problems))
    return a


def _read_input_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_compile(args) -> int:
    from .generators import compile_pattern
    if args.regex is not None:
        if args.start_kind is None:
            raise UsageError("--start-kind is required with --regex")
        from .regex import compile_regex
        automaton = compile_regex(args.regex, _start_kind(args.start_kind))
    else:
        ps = load_pattern_set(args.patterns)
        by_id = {p.id: p for p in ps.patterns}
        if args.id is None:
            if len(by_id) != 1:
                raise UsageError("--id is required when the set has "
                                 "several patterns")
            pattern = next(iter(by_id.values()))
        elif args.id in by_id:
            pattern = by_id[args.id]
        else:
            raise ValueError(f"no pattern with id {args.id}")
        kind = (_start_kind(args.start_kind) if args.start_kind
                else ps.start_kind)
        automaton = compile_pattern(pattern, kind)
    _write_automaton(automaton, args.out)
    return 0


def _cmd_generate(args) -> int:
    kind = _start_kind(args.start_kind)
    patterns: list[Pattern]
    if args.family == "dotstar":
        patterns = gen_dotstar(args.count, args.prefix_len, args.suffix_len,
                               args.alphabet_size, args.seed)
    elif args.family in ("hamming", "levenshtein"):
        patterns = gen_mesh_patterns(args.family, args.count,
                                     args.min_length, args.max_length,
                                     tuple(args.distance), args.alphabet_size,
                                     args.seed)
    else:  # random
        rng_seed = args.seed
        patterns = [
            Pattern(i, RandomRecipe(args.states, args.density,
                                    args.accept_density, args.alphabet_size,
                                    rng_seed + i))
            for i in range(args.count)
        ]
    save_pattern_set(PatternSet(tuple(patterns), kind, args.seed), args.out)
    return 0


def _cmd_optimize(args) -> int:
    _write_automaton(optimize_nfa(_load_valid(args.automaton)), args.out)
    return 0


def _cmd_determinize(args) -> int:
    _write_automaton(determinize(_load_valid(args.automaton), args.cap),
                     args.out)
    return 0


def _cmd_minimize(args) -> int:
    a = _load_valid(args.automaton)
    if args.minimizer == "brzozowski":
        b = minimize_brzozowski(a, args.cap)
    else:
        b = minimize_hopcroft(a)
    _write_automaton(b, args.out)
    return 0


def _cmd_components(args) -> int:
    parts = connected_components(_load_valid(args.automaton))
    paths = []
    for i, component in enumerate(parts):
        path = f"{args.out_prefix}.{i:03d}.json"
        save_automaton(component, path)
        paths.append(path)
    print(len(parts))
    for path in paths:
        print(path)
    return 0


def _cmd_merge(args) -> int:
    automata = [_load_valid(p) for p in args.automata]
    _write_automaton(merge_patterns(automata), args.out)
    return 0


def _cmd_equivalent(args) -> int:
    a, b = _load_valid(args.first), _load_valid(args.second)
    if equivalent(a, b, args.cap):
        print("equivalent")
        return 0
    print("not equivalent")
    return 1


def _cmd_stats(args) -> int:
    summary = stats(_load_valid(args.automaton))
    print(json.dumps({
        "state_count": summary.state_count,
        "transition_count": summary.transition_count,
        "max_fanout": summary.max_fanout,
        "avg_fanout": summary.avg_fanout,
        "accept_count": summary.accept_count,
        "start_count": summary.start_count,
    }, indent=2))
    return 0


def _cmd_simulate(args) -> int:
    trace = run(_load_valid(args.automaton), _read_input_bytes(args.input))
    text = render_trace(trace)
    if args.out:
        write_text_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_active_rules(args) -> int:
    components = connected_components(_load_valid(args.automaton))
    result = active_rule_frequency(components, _read_input_bytes(args.input))
    payload = json.dumps({
        "rules": len(components),
        "per_cycle_rule_count": list(result.per_cycle_rule_count),
        "min_active": result.min_active,
        "max_active": result.max_active,
        "start_only_fraction": result.start_only_fraction,
    }, indent=2) + "\n"
    if args.out:
        write_text_atomic(args.out, payload)
    else:
        sys.stdout.write(payload)
    return 0


def _growth_thresholds(args) -> GrowthThresholds:
    return GrowthThresholds(polynomial_slope=args.poly_slope,
                            linear_slope_min=args.linear_slope_min,
                            r2_margin=args.r2_margin)


def _cmd_report(args, merge: bool) -> int:
    ps = load_pattern_set(args.patterns)
    thresholds = _growth_thresholds(args)
    if merge:
        rows = incremental_merge_experiment(list(ps.patterns), args.seed,
                                            ps.start_kind, args.cap)
        xs = [row.key for row in rows]
    else:
        rows = per_pattern_experiment(list(ps.patterns), args.seed,
                                      ps.start_kind, args.cap)
        xs = experiment_x_axis(list(ps.patterns))
    growth = {}
    usable = (len(rows) >= 4
              and all(x2 > x1 for x1, x2 in zip(xs, xs[1:]))
              and all(r.status == "ok" for r in rows))
    if usable:
        growth["mdfa"] = classify_growth(rows, xs, "mdfa", thresholds)
        growth["opt_nfa"] = classify_growth(rows, xs, "opt_nfa", thresholds)
    emit_report(rows, xs, args.out, growth, args.seed, args.cap, args.timings)
    return 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="falab",
        description="Finite-automata workbench: compile, transform, "
                    "measure, and simulate byte-alphabet automata.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def cap_flag(p):
        p.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP,
                       help="determinization state cap")

    p = sub.add_parser("compile", help="compile a pattern to an NFA document")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--regex", help="pattern text")
    group.add_argument("--patterns", help="pattern-set document")
    p.add_argument("--id", type=int, help="pattern id within the set")
    p.add_argument("--start-kind", choices=_START_CHOICES)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("generate", help="generate a pattern-set document")
    fam = p.add_subparsers(dest="family", required=True)
    for name in ("dotstar", "hamming", "levenshtein", "random"):
        f = fam.add_parser(name)
        f.add_argument("--count", type=int, required=True)
        f.add_argument("--seed", type=int, required=True)
        f.add_argument("--alphabet-size", type=int, default=8)
        f.add_argument("--start-kind", choices=_START_CHOICES,
                       default=StartKind.START_OF_DATA.value)
        f.add_argument("--out", required=True)
        if name == "dotstar":
            f.add_argument("--prefix-len", type=int, default=2)
            f.add_argument("--suffix-len", type=int, default=2)
        elif name in ("hamming", "levenshtein"):
            f.add_argument("--min-length", type=int, required=True)
            f.add_argument("--max-length", type=int, required=True)
            f.add_argument("--distance", type=int, action="append",
                           required=True,
                           help="repeat to cycle several distances")
        else:
            f.add_argument("--states", type=int, required=True)
            f.add_argument("--density", type=float, required=True)
            f.add_argument("--accept-density", type=float, required=True)
        f.set_defaults(func=_cmd_generate)

    p = sub.add_parser("optimize", help="merge equal-behavior NFA states")
    p.add_argument("automaton")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("determinize", help="subset construction")
    p.add_argument("automaton")
    cap_flag(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_determinize)

    p = sub.add_parser("minimize", help="minimal DFA")
    p.add_argument("automaton")
    p.add_argument("--minimizer", choices=["brzozowski", "hopcroft"],
                   default="brzozowski")
    cap_flag(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("components", help="split weakly-connected components")
    p.add_argument("automaton")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_components)

    p = sub.add_parser("merge", help="union patterns behind a shared start")
    p.add_argument("automata", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("equivalent", help="exact language equivalence")
    p.add_argument("first")
    p.add_argument("second")
    cap_flag(p)
    p.set_defaults(func=_cmd_equivalent)

    p = sub.add_parser("stats", help="structural statistics as JSON")
    p.add_argument("automaton")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("simulate", help="scan a byte stream, emit the trace")
    p.add_argument("automaton")
    p.add_argument("--input", required=True, help="input bytes file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("active-rules",
                       help="per-cycle active-rule statistics")
    p.add_argument("automaton")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_active_rules)

    for name, merge in (("report-per-pattern", False), ("report-merge", True)):
        p = sub.add_parser(name, help="state-count experiment CSV")
        p.add_argument("patterns")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", required=True)
        cap_flag(p)
        p.add_argument("--timings", action="store_true",
                       help="write wall-clock cells (breaks byte-identical "
                            "reruns)")
        p.add_argument("--poly-slope", type=float, default=1.2)
        p.add_argument("--linear-slope-min", type=float, default=0.8)
        p.add_argument("--r2-margin", type=float, default=0.05)
        p.set_defaults(func=_cmd_report, merge=merge)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.func is _cmd_report:
            return args.func(args, args.merge)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"falab: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, CapExceededError, DocumentError, OSError) as exc:
        print(f"falab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
