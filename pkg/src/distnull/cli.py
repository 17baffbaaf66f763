"""Command-line surface: CSV in, deterministic tables out.

Subcommands: estimate, test, predict, calibrate, power, simulate, bmax.
Every command is a pure function of (input bytes, flags, seed): reals are
printed with 12 significant digits, probabilities below 1e-320 as
"<1e-320", rows sorted by (task, site), lines terminated with "\\n", so
repeated runs are byte-identical.

Exit codes: 0 success, 2 parse (malformed input file or I/O), 3
configuration (inconsistent flags or config file), 4 domain, 5 numeric.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .adapters import (
    ContingencyTable,
    contingency,
    contingency_regression,
    paired,
    regression,
    regression_experiment_summary,
    regression_statistic,
    statistic_from_summary,
    unpaired,
    unpaired_summary,
)
from .distributions import PROB_FLOOR
from .errors import (
    ConfigurationError,
    DistnullError,
    DomainError,
    NumericError,
    ParseError,
)
from .estimators import (
    ExperimentSummary,
    TaskSet,
    between_variance,
    standardize_means,
    summarize,
    variance_ratio,
)
from .oracle import SimConfig, bin_pairs, simulate_raw_task, task_pair_records
from .power import (
    PowerQuery,
    beta_distributional,
    beta_point,
    power_ceiling,
    required_sample_size,
)
from .replication import ReplicationQuery, b_max, p_rep_bound, p_rep_closed, p_rep_integral
from .significance import (
    TestStatistic,
    direction_of,
    p_point,
    p_sig_bound,
    p_sig_closed,
    p_sig_integral,
    t0_statistic,
)

IDENTIFIER = re.compile(r"^[A-Za-z0-9_-]+$")
DEFAULT_ALPHAS = "0.1,0.05,0.01,0.005,0.001"

_MODES = {"as-published": "as_published", "moment": "moment_corrected"}


# ---------------------------------------------------------------------------
# formatting


def _real(x: float) -> str:
    return f"{float(x):.12g}"


def _prob(p: float) -> str:
    p = float(p)
    return "<1e-320" if p <= PROB_FLOOR else f"{p:.12g}"


def _log10(p: float) -> str:
    p = float(p)
    return "<-320" if p <= PROB_FLOOR else f"{math.log10(p):.12g}"


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


# ---------------------------------------------------------------------------
# input loading


@dataclass(frozen=True)
class SiteData:
    """One experiment, reduced to family-correct summary and statistic."""

    task: str
    site: str
    summary: ExperimentSummary
    statistic: TestStatistic
    predictor_share: float | None = None


def _check_identifier(value: str | None, column: str, line: int) -> str:
    if value is None or value == "":
        raise ParseError(f"missing {column}", line=line)
    if not IDENTIFIER.match(value):
        raise ParseError(
            f"{column} {value!r} must match [A-Za-z0-9_-]+", line=line
        )
    return value


def _parse_real(text: str | None, column: str, line: int) -> float:
    if text is None or text == "":
        raise ParseError(f"missing {column}", line=line)
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{column} {text!r} is not a number", line=line) from None
    if not math.isfinite(value):
        raise ParseError(f"{column} must be finite, got {text!r}", line=line)
    return value


def _read_csv(path: str) -> tuple[list[str], list[tuple[int, dict[str, str]]]]:
    try:
        handle = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ParseError(f"{path} is empty", line=1)
        fields = list(reader.fieldnames)
        rows = []
        for row in reader:
            line = reader.line_num
            if row.get(None):
                raise ParseError("row has more fields than the header", line=line)
            for key in fields:
                if row.get(key) is None:
                    raise ParseError("row has fewer fields than the header", line=line)
            rows.append((line, row))
    if not rows:
        raise ParseError(f"{path} has a header but no rows", line=1)
    return fields, rows


SUMMARY_COLUMNS = ("task", "site", "n", "mean", "variance", "df")


def _detect_shape(fields: Sequence[str], family: str | None) -> str:
    head = set(fields)
    if head >= set(SUMMARY_COLUMNS):
        return "summary"
    if head == {"task", "site", "value"}:
        return "one_sample"
    if head == {"task", "site", "group", "value"}:
        return "two_sample"
    if head == {"task", "site", "x", "y"}:
        if family is None:
            raise ConfigurationError(
                "x+y files are ambiguous: pass --family paired|regression|contingency"
            )
        return family
    raise ParseError(
        "unrecognized columns "
        + ",".join(sorted(head))
        + "; expected task,site,value | task,site,group,value | task,site,x,y"
        " | task,site,n,mean,variance,df",
        line=1,
    )


def _wrap_domain(task: str, site: str, exc: DomainError) -> DomainError:
    return type(exc)(f"task {task!r} site {site!r}: {exc}")


def load_sites(path: str, family: str | None) -> tuple[str, list[SiteData]]:
    """Ingest a CSV into per-site summaries and statistics, sorted (task, site).

    Returns the detected shape name alongside the sites.
    """
    fields, rows = _read_csv(path)
    shape = _detect_shape(fields, family)
    if family is not None and shape != family:
        raise ConfigurationError(
            f"--family {family} does not apply to a {shape}-shaped file"
        )

    grouped: dict[tuple[str, str], list[tuple[int, dict[str, str]]]] = {}
    for line, row in rows:
        task = _check_identifier(row.get("task"), "task", line)
        site = _check_identifier(row.get("site"), "site", line)
        grouped.setdefault((task, site), []).append((line, row))

    sites = []
    for (task, site), members in sorted(grouped.items()):
        try:
            sites.append(_build_site(shape, task, site, members))
        except DomainError as exc:
            raise _wrap_domain(task, site, exc) from exc
    return shape, sites


def _build_site(
    shape: str, task: str, site: str, members: list[tuple[int, dict[str, str]]]
) -> SiteData:
    if shape == "summary":
        if len(members) > 1:
            raise ParseError(
                f"duplicate summary row for task {task!r} site {site!r}",
                line=members[1][0],
            )
        line, row = members[0]
        try:
            summary = ExperimentSummary(
                n=_parse_real(row["n"], "n", line),
                mean=_parse_real(row["mean"], "mean", line),
                sample_variance=_parse_real(row["variance"], "variance", line),
                df=_parse_real(row["df"], "df", line),
            )
        except DomainError as exc:
            raise ParseError(str(exc), line=line) from exc
        return SiteData(task, site, summary, statistic_from_summary(summary))

    if shape == "one_sample":
        values = [_parse_real(r["value"], "value", ln) for ln, r in members]
        summary = summarize(values)
        return SiteData(task, site, summary, statistic_from_summary(summary))

    if shape == "two_sample":
        groups: dict[str, list[float]] = {}
        for ln, r in members:
            gid = _check_identifier(r.get("group"), "group", ln)
            groups.setdefault(gid, []).append(_parse_real(r["value"], "value", ln))
        if len(groups) != 2:
            raise ParseError(
                f"task {task!r} site {site!r} has {len(groups)} groups; need exactly 2"
            )
        first, second = sorted(groups)
        summary = unpaired_summary(groups[first], groups[second])
        return SiteData(task, site, summary, unpaired(groups[first], groups[second]))

    xy = [
        (_parse_real(r["x"], "x", ln), _parse_real(r["y"], "y", ln))
        for ln, r in members
    ]
    if shape == "paired":
        stat = paired(xy)
        summary = summarize([x - y for x, y in xy])
        return SiteData(task, site, summary, stat)

    if shape == "regression":
        rs = regression([x for x, _ in xy], [y for _, y in xy])
        return SiteData(
            task, site, regression_experiment_summary(rs), regression_statistic(rs)
        )

    # contingency: 0/1 pairs aggregated to a 2x2 table
    counts = {(1, 1): 0, (1, 0): 0, (0, 1): 0, (0, 0): 0}
    for (ln, _), (x, y) in zip(members, xy):
        if x not in (0.0, 1.0) or y not in (0.0, 1.0):
            raise ParseError("contingency x and y must be 0 or 1", line=ln)
        counts[(int(x), int(y))] += 1
    table = ContingencyTable(
        n11=counts[(1, 1)], n10=counts[(1, 0)], n01=counts[(0, 1)], n00=counts[(0, 0)]
    )
    rs = contingency_regression(table)
    share = (table.n11 + table.n10) / table.total
    return SiteData(
        task,
        site,
        regression_experiment_summary(rs),
        contingency(table),
        predictor_share=share,
    )


# ---------------------------------------------------------------------------
# variance-source resolution


@dataclass(frozen=True)
class VarianceSource:
    """Resolved (b_hat, nu0) per experiment, or a global bound."""

    constant: tuple[float, float] | None = None
    table: dict[tuple[str, str], tuple[float, float]] | None = None
    bound: float | None = None

    def lookup(self, task: str, site: str) -> tuple[float, float]:
        if self.constant is not None:
            return self.constant
        assert self.table is not None
        try:
            return self.table[(task, site)]
        except KeyError:
            raise ConfigurationError(
                f"--b-from has no estimate for task {task!r} site {site!r}"
            ) from None


def _load_b_from(path: str) -> dict[tuple[str, str], tuple[float, float]]:
    fields, rows = _read_csv(path)
    needed = {"task", "site", "b_hat", "nu0"}
    if not needed <= set(fields):
        raise ParseError(f"{path} lacks columns task,site,b_hat,nu0", line=1)
    table: dict[tuple[str, str], tuple[float, float]] = {}
    for line, row in rows:
        task = _check_identifier(row.get("task"), "task", line)
        site = _check_identifier(row.get("site"), "site", line)
        if row["b_hat"] == "" or row["nu0"] == "":
            continue  # skipped or degenerate rows carry no estimate
        if (task, site) in table:
            raise ParseError(
                f"duplicate estimate for task {task!r} site {site!r}", line=line
            )
        b_hat = _parse_real(row["b_hat"], "b_hat", line)
        nu0 = _parse_real(row["nu0"], "nu0", line)
        if b_hat < 0:
            raise ParseError(f"b_hat must be >= 0, got {b_hat}", line=line)
        if nu0 < 1:
            raise ParseError(f"nu0 must be >= 1, got {nu0}", line=line)
        table[(task, site)] = (b_hat, nu0)
    return table


def resolve_variance(args: argparse.Namespace) -> VarianceSource:
    variant = args.variant
    has_b = args.b is not None
    has_from = args.b_from is not None
    has_bound = args.bound is not None
    has_nu0 = args.nu0 is not None

    if variant in ("closed", "integral"):
        if has_bound:
            raise ConfigurationError(f"--bound is not used by --variant {variant}")
        if has_b and has_from:
            raise ConfigurationError("--b and --b-from are mutually exclusive")
        if has_b:
            if not has_nu0:
                raise ConfigurationError("--b requires --nu0")
            if args.b < 0:
                raise ConfigurationError(f"--b must be >= 0, got {args.b}")
            if args.nu0 < 1:
                raise ConfigurationError(f"--nu0 must be >= 1, got {args.nu0}")
            return VarianceSource(constant=(args.b, args.nu0))
        if has_from:
            if has_nu0:
                raise ConfigurationError("--nu0 conflicts with --b-from")
            return VarianceSource(table=_load_b_from(args.b_from))
        raise ConfigurationError(
            f"--variant {variant} needs a variance source: --b with --nu0, or --b-from"
        )

    if variant == "bound":
        if has_b or has_from or has_nu0:
            raise ConfigurationError("--variant bound uses --bound only")
        if not has_bound:
            raise ConfigurationError("--variant bound requires --bound")
        if args.bound <= 0:
            raise ConfigurationError(f"--bound must be > 0, got {args.bound}")
        return VarianceSource(bound=args.bound)

    # point
    if has_b or has_from or has_bound or has_nu0:
        raise ConfigurationError("--variant point takes no variance source flags")
    return VarianceSource()


# ---------------------------------------------------------------------------
# subcommands


def cmd_estimate(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    mode = _MODES[args.mode]
    _, sites = load_sites(args.input, args.family)
    header = [
        "task", "site", "n", "mean", "variance", "df", "k", "grand_mean",
        "s0_sq", "nu0", "b_hat", "z", "mode", "note",
    ]
    by_task: dict[str, list[SiteData]] = {}
    for s in sites:
        by_task.setdefault(s.task, []).append(s)

    out: list[list[str]] = []
    for task, group in sorted(by_task.items()):
        base = [
            [s.site, _real(s.summary.n), _real(s.summary.mean),
             _real(s.summary.sample_variance), _real(s.summary.df)]
            for s in group
        ]
        if len(group) < 2:
            for cols in base:
                out.append([task, *cols, "", "", "", "", "", "",
                            mode, "skipped_single_site"])
            continue
        task_set = TaskSet(task, tuple(s.summary for s in group))
        try:
            b0 = between_variance(task_set, mode)
        except DomainError as exc:
            raise type(exc)(f"task {task!r}: {exc}") from exc
        if b0.s0_sq > 0.0:
            zs = [_real(z) for z in standardize_means(task_set, b0)]
            note = ""
        else:
            zs = [""] * len(group)
            note = "degenerate_variance"
        for s, cols, z in zip(group, base, zs):
            try:
                b_hat = _real(variance_ratio(b0, s.summary))
            except DomainError as exc:
                raise _wrap_domain(task, s.site, exc) from exc
            out.append([task, *cols, _real(task_set.k), _real(b0.grand_mean),
                        _real(b0.s0_sq), _real(b0.nu0), b_hat, z, mode, note])
    return header, out


def cmd_test(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    _validate_alpha(args.alpha)
    _validate_scale(args.scale_e)
    source = resolve_variance(args)
    _, sites = load_sites(args.input, args.family)
    header = [
        "task", "site", "n", "df", "t", "effect", "t0", "alpha", "variant",
        "b_used", "nu0_used", "bound", "scale_e", "p_point", "log10_p_point",
        "p_sig", "log10_p_sig", "direction", "significant",
    ]
    out = []
    for s in sites:
        stat = s.statistic
        pp = p_point(stat)
        t0_text = b_text = nu0_text = bound_text = ""
        try:
            if args.variant == "point":
                p_sig = pp
            elif args.variant == "bound":
                p_sig = p_sig_bound(stat, source.bound)
                bound_text = _real(source.bound)
            else:
                b_hat, nu0 = source.lookup(s.task, s.site)
                b_used = b_hat * args.scale_e
                if args.variant == "closed":
                    p_sig = p_sig_closed(stat, b_used, nu0)
                else:
                    p_sig = p_sig_integral(stat, b_used, nu0)
                t0_text = _real(t0_statistic(stat, b_used))
                b_text = _real(b_used)
                nu0_text = _real(nu0)
        except DomainError as exc:
            raise _wrap_domain(s.task, s.site, exc) from exc
        direction = direction_of(stat)
        significant = p_sig <= args.alpha
        if args.direction is not None and direction != args.direction:
            significant = False
        out.append([
            s.task, s.site, _real(stat.n), _real(stat.df), _real(stat.t),
            _real(stat.effect), t0_text, _real(args.alpha), args.variant,
            b_text, nu0_text, bound_text, _real(args.scale_e),
            _prob(pp), _log10(pp), _prob(p_sig), _log10(p_sig),
            direction, _bool(significant),
        ])
    return header, out


def _replication_design(
    args: argparse.Namespace, shape_family: str, s: SiteData
) -> tuple[float, float]:
    """Per-family (n_r, df_r) from --nr / --df-r, per the documented map."""
    n_r = args.nr
    if shape_family == "two_sample":
        df_r = args.df_r if args.df_r is not None else n_r - 2
    elif shape_family == "regression":
        if args.df_r is None:
            raise ConfigurationError(
                "--family regression needs an explicit --df-r for prediction"
            )
        df_r = args.df_r
    elif shape_family == "contingency":
        share = s.predictor_share if s.predictor_share is not None else 0.5
        df_r = args.df_r if args.df_r is not None else n_r - 2
        n_r = n_r * share * (1.0 - share)
    else:
        df_r = args.df_r if args.df_r is not None else n_r - 1
    return n_r, df_r


def cmd_predict(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    _validate_alpha(args.alpha)
    _validate_scale(args.scale_e)
    if args.nr is None:
        raise ConfigurationError("predict requires --nr")
    if not (math.isfinite(args.nr) and args.nr > 0):
        raise ConfigurationError(f"--nr must be > 0, got {args.nr}")
    source = resolve_variance(args)
    shape, sites = load_sites(args.input, args.family)
    header = [
        "task", "site", "n", "df", "t", "n_r", "df_r", "alpha", "variant",
        "b_used", "nu0_used", "bound", "scale_e", "p_rep", "log10_p_rep",
        "tau", "z_max", "b_max",
    ]
    out = []
    for s in sites:
        stat = s.statistic
        n_r, df_r = _replication_design(args, shape, s)
        b_text = nu0_text = bound_text = ""
        try:
            query = ReplicationQuery(stat=stat, n_r=n_r, df_r=df_r, alpha=args.alpha)
            if args.variant == "bound":
                forecast = p_rep_bound(query, source.bound)
                bound_text = _real(source.bound)
            else:
                b_hat, nu0 = source.lookup(s.task, s.site)
                b_used = b_hat * args.scale_e
                if args.variant == "closed":
                    forecast = p_rep_closed(query, b_used, nu0)
                else:
                    forecast = p_rep_integral(query, b_used, nu0)
                b_text = _real(b_used)
                nu0_text = _real(nu0)
            if stat.t == 0.0:
                tau_text = zmax_text = bmax_text = ""
            else:
                diag = b_max(stat, args.alpha)
                tau_text = _real(diag.tau)
                zmax_text = _real(diag.z_max)
                bmax_text = _real(diag.b_max)
        except DomainError as exc:
            raise _wrap_domain(s.task, s.site, exc) from exc
        out.append([
            s.task, s.site, _real(stat.n), _real(stat.df), _real(stat.t),
            _real(n_r), _real(df_r), _real(args.alpha), args.variant,
            b_text, nu0_text, bound_text, _real(args.scale_e),
            _prob(forecast), _log10(forecast),
            tau_text, zmax_text, bmax_text,
        ])
    return header, out


def cmd_calibrate(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    _validate_scale(args.scale_e)
    alphas = _parse_alphas(args.alphas)
    mode = _MODES[args.mode]
    _, sites = load_sites(args.input, args.family)
    by_task: dict[str, list[SiteData]] = {}
    for s in sites:
        by_task.setdefault(s.task, []).append(s)

    records = []
    for task, group in sorted(by_task.items()):
        if len(group) < 2:
            print(
                f"warning: task {task!r} has a single site; skipped",
                file=sys.stderr,
            )
            continue
        task_set = TaskSet(task, tuple(s.summary for s in group))
        try:
            records.extend(
                task_pair_records(
                    task_set, alphas, mode=mode,
                    scale_e=args.scale_e, variant=args.variant,
                )
            )
        except DomainError as exc:
            raise type(exc)(f"task {task!r}: {exc}") from exc
    if not records:
        raise DomainError("no task with >= 2 sites; nothing to calibrate")

    bins = bin_pairs(records)
    included = [b for b in bins if b.pair_count >= 40]
    direction = ""
    if included:
        weight = sum(b.pair_count for b in included)
        gap = sum(
            b.pair_count * (b.observed_rate - b.mean_forecast) for b in included
        ) / weight
        direction = (
            "underestimation" if gap > 0
            else "overestimation" if gap < 0
            else "balanced"
        )
    header = [
        "predictor_significant", "lower", "upper", "pairs", "mean_forecast",
        "observed_rate", "included", "scale_e", "direction",
    ]
    out = [
        [
            _bool(b.predictor_significant), _real(b.lower), _real(b.upper),
            _real(b.pair_count), _real(b.mean_forecast), _real(b.observed_rate),
            _bool(b.pair_count >= 40), _real(args.scale_e), direction,
        ]
        for b in bins
    ]
    return header, out


def cmd_power(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    _validate_alpha(args.alpha)
    if args.n is None:
        raise ConfigurationError("power requires --n")
    df = args.df if args.df is not None else args.n - 1
    header = [
        "effect", "n", "df", "alpha", "b", "beta_point", "power_point",
        "beta_distributional", "power_distributional", "power_ceiling",
        "target_power", "feasible", "required_n",
    ]
    query = PowerQuery(
        effect=args.effect, n=args.n, df=df, alpha=args.alpha, b=args.b
    )
    bp = beta_point(query)
    ceiling = power_ceiling(args.effect, df, args.alpha)
    if args.b is not None:
        bd = beta_distributional(query)
        bd_text, pd_text = _real(bd), _real(1.0 - bd)
    else:
        bd_text = pd_text = ""

    target_text = feasible_text = required_text = ""
    if args.target_power is not None:
        if not (0.0 < args.target_power < 1.0):
            raise ConfigurationError(
                f"--target-power must lie in (0, 1), got {args.target_power}"
            )
        target_text = _real(args.target_power)
        if args.b is not None and args.target_power > ceiling:
            feasible_text = "false"
        elif args.effect == 0.0 and args.target_power > args.alpha:
            feasible_text = "false"
        else:
            feasible_text = "true"
            required_text = _real(
                required_sample_size(args.effect, args.alpha, args.target_power)
            )
    row = [
        _real(args.effect), _real(args.n), _real(df), _real(args.alpha),
        _real(args.b) if args.b is not None else "",
        _real(bp), _real(1.0 - bp), bd_text, pd_text, _real(ceiling),
        target_text, feasible_text, required_text,
    ]
    return header, [row]


def _load_sim_config(path: str, seed_override: int | None) -> SimConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    allowed = {
        "mu0", "sigma0", "sigma", "n_per_experiment", "k_experiments",
        "n_tasks", "alpha_levels", "seed", "variance_scale_e",
    }
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigurationError(
            "unknown config keys: " + ",".join(sorted(unknown))
        )
    if "alpha_levels" in raw:
        levels = raw["alpha_levels"]
        if not isinstance(levels, list):
            raise ConfigurationError("alpha_levels must be a list")
        raw["alpha_levels"] = tuple(levels)
    if seed_override is not None:
        raw["seed"] = seed_override
    try:
        return SimConfig(**raw)
    except DomainError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    except TypeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def cmd_simulate(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    config = _load_sim_config(args.config, args.seed)
    header = ["task", "site", "value"]
    out = []
    for stream in range(config.n_tasks):
        matrix = simulate_raw_task(config, stream)
        task = f"task{stream:04d}"
        for j in range(config.k_experiments):
            site = f"site{j:04d}"
            out.extend([task, site, _real(v)] for v in matrix[j])
    return header, out


def cmd_bmax(args: argparse.Namespace) -> tuple[list[str], list[list[str]]]:
    _validate_alpha(args.alpha)
    _, sites = load_sites(args.input, args.family)
    header = ["task", "site", "n", "df", "t", "effect", "alpha", "tau", "z_max", "b_max"]
    out = []
    for s in sites:
        stat = s.statistic
        if stat.t == 0.0:
            tau_text = zmax_text = bmax_text = ""
        else:
            try:
                diag = b_max(stat, args.alpha)
            except DomainError as exc:
                raise _wrap_domain(s.task, s.site, exc) from exc
            tau_text = _real(diag.tau)
            zmax_text = _real(diag.z_max)
            bmax_text = _real(diag.b_max)
        out.append([
            s.task, s.site, _real(stat.n), _real(stat.df), _real(stat.t),
            _real(stat.effect), _real(args.alpha),
            tau_text, zmax_text, bmax_text,
        ])
    return header, out


# ---------------------------------------------------------------------------
# plumbing


def _validate_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ConfigurationError(f"--alpha must lie in (0, 1), got {alpha}")


def _validate_scale(scale_e: float) -> None:
    if not (math.isfinite(scale_e) and scale_e > 0.0):
        raise ConfigurationError(f"--scale-e must be > 0, got {scale_e}")


def _parse_alphas(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigurationError("--alphas needs at least one level")
    levels = []
    for part in parts:
        try:
            value = float(part)
        except ValueError:
            raise ConfigurationError(f"--alphas entry {part!r} is not a number") from None
        if not (0.0 < value < 1.0):
            raise ConfigurationError(f"alpha {value} must lie in (0, 1)")
        if value in levels:
            raise ConfigurationError(f"duplicate alpha {value}")
        levels.append(value)
    return tuple(levels)


def _write(path: str | None, header: list[str], rows: Iterable[list[str]]) -> None:
    def emit(stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    if path is None:
        emit(sys.stdout)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            emit(handle)
    except OSError as exc:
        raise ParseError(f"cannot write {path}: {exc}") from exc


def _add_io(parser: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", help="output CSV path (default stdout)")


def _add_family(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--family", choices=("paired", "regression", "contingency"),
        help="experiment family for x+y files (ambiguous without it)",
    )


def _add_variance_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--b", type=float, help="explicit variance ratio b-hat")
    parser.add_argument("--nu0", type=float, help="between-variance df (with --b)")
    parser.add_argument(
        "--b-from", dest="b_from", help="estimate CSV supplying b_hat and nu0"
    )
    parser.add_argument("--bound", type=float, help="variance-ratio bound B")
    parser.add_argument(
        "--scale-e", dest="scale_e", type=float, default=1.0,
        help="multiply the b-hat estimate by e before use (default 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distnull",
        description=(
            "Significance and replication-probability analysis under a "
            "distributional null, over CSV experiment data."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="between-experiment variance per task")
    _add_io(p)
    _add_family(p)
    p.add_argument("--mode", choices=tuple(_MODES), default="as-published")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("test", help="significance report per experiment")
    _add_io(p)
    _add_family(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument(
        "--variant", choices=("point", "closed", "integral", "bound"),
        default="closed",
    )
    p.add_argument("--direction", choices=("positive", "negative"))
    _add_variance_source(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("predict", help="replication forecast per experiment")
    _add_io(p)
    _add_family(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument(
        "--variant", choices=("closed", "integral", "bound"), default="closed"
    )
    p.add_argument(
        "--nr", "--n-rep", dest="nr", type=float,
        help="replication size: N_r (count families) or Q_r (regression)",
    )
    p.add_argument(
        "--df-r", "--df-rep", dest="df_r", type=float,
        help="replication df (required for regression; defaulted elsewhere)",
    )
    _add_variance_source(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("calibrate", help="binned forecast-vs-outcome table")
    _add_io(p)
    _add_family(p)
    p.add_argument("--alphas", default=DEFAULT_ALPHAS)
    p.add_argument("--variant", choices=("closed", "integral"), default="closed")
    p.add_argument("--mode", choices=tuple(_MODES), default="as-published")
    p.add_argument("--scale-e", dest="scale_e", type=float, default=1.0)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("power", help="power and feasibility for a design")
    _add_io(p, needs_input=False)
    p.add_argument("--effect", type=float, required=True)
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--df", type=float)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--b", type=float)
    p.add_argument("--target-power", dest="target_power", type=float)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("simulate", help="raw CSV from the hierarchical model")
    p.add_argument("--config", required=True, help="JSON simulation config")
    p.add_argument("--output", help="output CSV path (default stdout)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bmax", help="most-favorable variance ratio per experiment")
    _add_io(p)
    _add_family(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_bmax)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        header, rows = args.func(args)
        _write(getattr(args, "output", None), header, rows)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DistnullError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
