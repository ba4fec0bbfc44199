"""State-count experiment runners, growth classification, and report files.

Pipeline per item, fixed and recorded in every report manifest:
compile -> remove_epsilon -> trim -> optimize_nfa -> determinize ->
minimize (Brzozowski, cross-checked against Hopcroft).  All state counts
exclude unreachable states and the implicit dead state.

Timings are measured per stage but written to the CSV only on request:
wall-clock values would break the byte-identical rerun guarantee, so the
default leaves the timing cells empty.
"""

from __future__ import annotations

import enum
import math
import os
import time
from dataclasses import dataclass, field
from statistics import correlation, linear_regression

from ._version import __version__
from .core import Automaton, StartKind, stats
from .generators import Pattern, SplitMix64, compile_pattern, pattern_size
from .transform import (CapExceededError, DEFAULT_STATE_CAP, determinize,
                        equivalent, merge_patterns, minimize_brzozowski,
                        minimize_hopcroft, optimize_nfa, remove_epsilon, trim)

CAP_TOKEN = "CAP_EXCEEDED"

PIPELINE = ("compile", "remove_epsilon", "trim", "optimize_nfa",
            "determinize", "minimize_brzozowski(crosscheck=hopcroft)")

CSV_HEADER = ("key,nfa_states,opt_nfa_states,dfa_states,mdfa_states,"
              "nfa_max_fanout,mdfa_max_fanout,"
              "t_compile_s,t_optimize_s,t_determinize_s,t_minimize_s,status")


@dataclass(frozen=True)
class ReportRow:
    """One pipeline run: a pattern id or a merge step k.

    Counts hit by the determinization cap are None and the status records
    the failure; such rows stay in the report rather than vanishing.
    """

    key: int
    nfa_states: int
    opt_nfa_states: int
    dfa_states: int | None
    mdfa_states: int | None
    nfa_max_fanout: int
    mdfa_max_fanout: int | None
    t_compile_s: float
    t_optimize_s: float
    t_determinize_s: float
    t_minimize_s: float
    status: str = "ok"


class GrowthLabel(enum.Enum):
    EQUAL = "equal"
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class GrowthClass:
    """Classification plus the fit diagnostics it was based on."""

    label: GrowthLabel
    loglog_slope: float
    loglog_r2: float
    semilog_slope: float
    semilog_r2: float
    series: str

    def describe(self) -> str:
        return (f"{self.label.value} "
                f"(loglog slope={self.loglog_slope:.3f} r2={self.loglog_r2:.3f}, "
                f"semilog slope={self.semilog_slope:.3f} r2={self.semilog_r2:.3f})")


@dataclass(frozen=True)
class GrowthThresholds:
    """Defaults for the fit-based classification; all overridable."""

    polynomial_slope: float = 1.2
    linear_slope_min: float = 0.8
    r2_margin: float = 0.05


def fit_loglinear(xs: list[float], ys: list[float]) -> tuple[float, float]:
    """Least-squares slope and R^2 of ys against xs."""
    slope, _ = linear_regression(xs, ys)
    if len(set(ys)) == 1:
        return slope, 1.0  # constant series: a flat line fits exactly
    return slope, correlation(xs, ys) ** 2


def classify_points(xs: list[float], ys: list[float],
                    thresholds: GrowthThresholds = GrowthThresholds(),
                    series: str = "series") -> GrowthClass:
    """Fit-based growth class of a positive series over increasing x.

    Exponential wins when the semi-log fit beats the log-log fit by the
    R^2 margin with positive slope; otherwise the log-log slope picks
    polynomial (above the threshold) or linear.  Sub-linear slopes fall
    into the linear bucket: the classes describe growth *at most* that
    fast, and the point of the classification is separating blowup from
    benign growth.
    """
    if len(xs) < 4:
        raise ValueError("growth classification needs at least 4 points")
    if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("x values must be strictly increasing")
    if any(y <= 0 for y in ys):
        raise ValueError("series values must be positive")
    log_x = [math.log(x) for x in xs]
    log_y = [math.log(y) for y in ys]
    ll_slope, ll_r2 = fit_loglinear(log_x, log_y)
    sl_slope, sl_r2 = fit_loglinear(list(map(float, xs)), log_y)
    if sl_slope > 0 and sl_r2 - ll_r2 >= thresholds.r2_margin:
        label = GrowthLabel.EXPONENTIAL
    elif ll_slope > thresholds.polynomial_slope:
        label = GrowthLabel.POLYNOMIAL
    else:
        label = GrowthLabel.LINEAR
    return GrowthClass(label, ll_slope, ll_r2, sl_slope, sl_r2, series)


def classify_growth(rows: list[ReportRow], xs: list[int],
                    series: str = "mdfa",
                    thresholds: GrowthThresholds = GrowthThresholds()) -> GrowthClass:
    """Growth class of one report column against the given x axis.

    The mdfa series classifies EQUAL when every row has
    mdfa_states == opt_nfa_states; otherwise (and for the opt series) the
    fit decides.  Rows whose counts are missing (cap exceeded) cannot be
    classified.
    """
    if len(rows) != len(xs):
        raise ValueError("rows and x values differ in length")
    if series not in ("mdfa", "opt_nfa", "nfa", "dfa"):
        raise ValueError(f"unknown series {series!r}")
    values = {
        "mdfa": [r.mdfa_states for r in rows],
        "opt_nfa": [r.opt_nfa_states for r in rows],
        "nfa": [r.nfa_states for r in rows],
        "dfa": [r.dfa_states for r in rows],
    }[series]
    if any(v is None for v in values):
        raise ValueError(f"series {series!r} has rows without counts "
                         f"(status != ok)")
    if series == "mdfa" and all(r.mdfa_states == r.opt_nfa_states for r in rows):
        xs_f = [math.log(x) for x in xs]
        ys_f = [math.log(v) for v in values]
        ll_slope, ll_r2 = fit_loglinear(xs_f, ys_f)
        sl_slope, sl_r2 = fit_loglinear(list(map(float, xs)), ys_f)
        return GrowthClass(GrowthLabel.EQUAL, ll_slope, ll_r2,
                           sl_slope, sl_r2, series)
    return classify_points(list(map(float, xs)), list(map(float, values)),
                           thresholds, series)


# ---------------------------------------------------------------------------
# Experiment runners


@dataclass
class _StageResult:
    nfa: Automaton
    opt: Automaton
    dfa: Automaton | None
    mdfa: Automaton | None
    row: ReportRow


def _run_pipeline(key: int, nfa_raw: Automaton,
                  cap: int) -> _StageResult:
    t0 = time.perf_counter()
    nfa = trim(remove_epsilon(nfa_raw))
    t1 = time.perf_counter()
    opt = optimize_nfa(nfa)
    t2 = time.perf_counter()
    dfa = mdfa = None
    status = "ok"
    try:
        dfa = determinize(nfa, cap)
        t3 = time.perf_counter()
        mdfa = minimize_brzozowski(nfa, cap)
        hop = minimize_hopcroft(dfa)
        t4 = time.perf_counter()
        if hop.state_count != mdfa.state_count:
            raise AssertionError(
                f"minimizer disagreement on key {key}: brzozowski "
                f"{mdfa.state_count} vs hopcroft {hop.state_count}")
    except CapExceededError:
        status = CAP_TOKEN
        t3 = time.perf_counter() if dfa is None else t3
        t4 = t3
    nfa_stats = stats(nfa)
    row = ReportRow(
        key=key,
        nfa_states=nfa.state_count,
        opt_nfa_states=opt.state_count,
        dfa_states=dfa.state_count if dfa is not None else None,
        mdfa_states=mdfa.state_count if mdfa is not None else None,
        nfa_max_fanout=nfa_stats.max_fanout,
        mdfa_max_fanout=stats(mdfa).max_fanout if mdfa is not None else None,
        t_compile_s=t1 - t0,
        t_optimize_s=t2 - t1,
        t_determinize_s=(t3 - t2) if dfa is not None else 0.0,
        t_minimize_s=(t4 - t3) if mdfa is not None else 0.0,
        status=status,
    )
    return _StageResult(nfa, opt, dfa, mdfa, row)


def _spot_check(results: list[_StageResult], seed: int, cap: int,
                sample_size: int = 4) -> None:
    """Verify language preservation on a seeded sample of rows."""
    ok_rows = [r for r in results if r.row.status == "ok"]
    if not ok_rows:
        return
    rng = SplitMix64(seed ^ 0x5EED5EED)
    picks = rng.sample(len(ok_rows), min(sample_size, len(ok_rows)))
    for i in picks:
        r = ok_rows[i]
        if not equivalent(r.nfa, r.opt, cap) or not equivalent(r.nfa, r.mdfa, cap):
            raise AssertionError(
                f"pipeline changed the language on key {r.row.key}")


def per_pattern_experiment(patterns: list[Pattern], seed: int,
                           start_kind: StartKind = StartKind.START_OF_DATA,
                           cap: int = DEFAULT_STATE_CAP,
                           spot_check: bool = True) -> list[ReportRow]:
    """One pipeline run per pattern; rows ordered by pattern id."""
    results = []
    for p in sorted(patterns, key=lambda p: p.id):
        results.append(_run_pipeline(p.id, compile_pattern(p, start_kind), cap))
    if spot_check:
        _spot_check(results, seed, cap)
    return [r.row for r in results]


def incremental_merge_experiment(patterns: list[Pattern], seed: int,
                                 start_kind: StartKind = StartKind.START_OF_DATA,
                                 cap: int = DEFAULT_STATE_CAP,
                                 spot_check: bool = True) -> list[ReportRow]:
    """Merge the first k patterns for k = 1..n and run the pipeline on each.

    Cap-exceeded rows are expected at larger k for explosive families and
    are recorded, not dropped.
    """
    if len(patterns) < 2:
        raise ValueError("incremental merge needs at least 2 patterns")
    ordered = sorted(patterns, key=lambda p: p.id)
    compiled = [compile_pattern(p, start_kind) for p in ordered]
    results = []
    for k in range(1, len(compiled) + 1):
        merged = merge_patterns(compiled[:k], [p.id for p in ordered[:k]])
        results.append(_run_pipeline(k, merged, cap))
    if spot_check:
        _spot_check(results, seed, cap)
    return [r.row for r in results]


# ---------------------------------------------------------------------------
# Report emission


def _cell(value) -> str:
    return CAP_TOKEN if value is None else str(value)


def render_report(rows: list[ReportRow],
                  growth: dict[str, GrowthClass] | None = None,
                  seed: int | None = None,
                  cap: int = DEFAULT_STATE_CAP,
                  include_timings: bool = False) -> str:
    """CSV text with a manifest header.

    Timing cells are left empty unless ``include_timings`` is set, so the
    default output is byte-identical across reruns of the same seed.
    """
    lines = [
        "# falab-report v1",
        f"# tool_version: {__version__}",
        f"# seed: {'none' if seed is None else seed}",
        f"# pipeline: {' -> '.join(PIPELINE)}",
        "# counting: reachable states only; implicit dead state excluded",
        f"# cap: {cap}",
        f"# timings: {'measured' if include_timings else 'omitted'}",
    ]
    for name, g in sorted((growth or {}).items()):
        lines.append(f"# growth[{name}]: {g.describe()}")
    lines.append(CSV_HEADER)
    for r in rows:
        timing_cells = ["", "", "", ""]
        if include_timings:
            timing_cells = [f"{t:.6f}" for t in
                            (r.t_compile_s, r.t_optimize_s,
                             r.t_determinize_s, r.t_minimize_s)]
        lines.append(",".join([
            str(r.key), _cell(r.nfa_states), _cell(r.opt_nfa_states),
            _cell(r.dfa_states), _cell(r.mdfa_states),
            _cell(r.nfa_max_fanout), _cell(r.mdfa_max_fanout),
            *timing_cells, r.status]))
    return "\n".join(lines) + "\n"


def render_plot_data(rows: list[ReportRow], xs: list[int]) -> str:
    """Tab-separated x / opt / mdfa columns, ready for log-log plotting.

    Values are raw (not pre-logged); rows without counts keep empty cells.
    """
    lines = ["x\topt_nfa_states\tmdfa_states"]
    for x, r in zip(xs, rows):
        mdfa = "" if r.mdfa_states is None else str(r.mdfa_states)
        lines.append(f"{x}\t{r.opt_nfa_states}\t{mdfa}")
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write-temp-then-rename so readers never see partial files."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit_report(rows: list[ReportRow], xs: list[int], destination: str,
                growth: dict[str, GrowthClass] | None = None,
                seed: int | None = None,
                cap: int = DEFAULT_STATE_CAP,
                include_timings: bool = False) -> list[str]:
    """Write the CSV and its companion plot-data file; returns the paths."""
    try:
        write_atomic(destination, render_report(rows, growth, seed, cap,
                                                include_timings))
        plot_path = destination + ".plot.tsv"
        write_atomic(plot_path, render_plot_data(rows, xs))
    except OSError as exc:
        raise OSError(f"cannot write report to {destination!r}: {exc}") from exc
    return [destination, plot_path]


def experiment_x_axis(patterns: list[Pattern]) -> list[int]:
    """Pattern-size x values, ordered by pattern id."""
    return [pattern_size(p) for p in sorted(patterns, key=lambda p: p.id)]
