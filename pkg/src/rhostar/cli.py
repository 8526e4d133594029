"""Command-line frontend.

Subcommands: test, components, weights, eigen, ksample, table,
frechet, demo.  Sample input is two-column CSV (header auto-detected),
count tables are rectangular CSV matrices with optional label row and
column, and two pseudo-paths work everywhere a data path is expected:

    bundled:mental-health          the packaged 6x4 status table
    demo:KIND,n=N,seed=S           generated data, KIND in {a,b,c,d}

Reports are JSON with every float at 17 significant digits; a seeded
run produces identical bytes apart from the timestamp field.  Exit
codes: 0 success, 2 input problem, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .analyze import (frechet_curves, gen_demo_data, render_scatter_fig,
                      render_scatter_svg, weights_component, weights_overall,
                      write_weights_csv)
from .datasets import mental_health
from .dist import get_family, discretize, mid_cdf
from .eigen import eigensystem_tridiag
from .estimate import (DegenerateMarginError, PairedSample, _margin_eigensystem,
                       component_correlations, estimate_kappa, expand_counts,
                       rho_star)
from .grade import KSampleData, grade_scale, grade_transform, ksample_kappa
from .infer import asymptotic_pvalue, component_tests, permutation_test

__all__ = ["main", "RunConfig"]

_GRADE_CHOICES = ("uniform", "logistic", "normal", "exponential", "laplace")


class InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved invocation: what to run, on what, with which knobs."""

    command: str
    input: str | None
    method: str | None
    B: int
    draws: int
    seed: int | None
    max_k: int | None
    max_l: int | None
    grade: str | None
    out: str | None
    plot: str | None
    csv: str | None
    fig: str | None
    threads: int


# ---------------------------------------------------------------------------
# JSON with fixed float formatting

def _fmt_float(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        return "null"
    return f"{float(value):.17g}"


def _to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            return "[]"
        inner = ",\n".join(pad + "  " + _to_json(v, indent + 1) for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(pad + "  " + json.dumps(str(k)) + ": " + _to_json(v, indent + 1)
                           for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(report: dict, out: str | None) -> None:
    text = _to_json(report) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------------
# Input handling

def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path: str) -> list[tuple[int, list[str]]]:
    """Non-empty CSV rows with their 1-based line numbers."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        out = []
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row]
            if any(cells):
                out.append((lineno, cells))
    if not out:
        raise InputError(f"{path}: no data rows")
    return out


def _parse_demo_path(path: str) -> PairedSample:
    body = path[len("demo:"):]
    parts = body.split(",")
    kind = parts[0]
    params = {}
    for piece in parts[1:]:
        key, sep, value = piece.partition("=")
        if not sep or key not in ("n", "seed") or not value.lstrip("-").isdigit():
            raise InputError(f"bad demo spec {path!r}; use demo:KIND,n=N,seed=S")
        params[key] = int(value)
    if kind not in ("a", "b", "c", "d") or set(params) != {"n", "seed"}:
        raise InputError(f"bad demo spec {path!r}; use demo:KIND,n=N,seed=S")
    if params["n"] < 1:
        raise InputError("demo n must be at least 1")
    return gen_demo_data(kind, params["n"], params["seed"])


def load_pairs(path: str) -> PairedSample:
    """Paired observations from a path or pseudo-path."""
    if path == "bundled:mental-health":
        return mental_health()
    if path.startswith("bundled:"):
        raise InputError(f"unknown bundled dataset {path!r}")
    if path.startswith("demo:"):
        return _parse_demo_path(path)
    rows = _read_rows(path)
    start = 1 if not all(_is_number(c) for c in rows[0][1]) else 0
    xs, ys = [], []
    for lineno, cells in rows[start:]:
        if len(cells) != 2:
            raise InputError(f"{path}: line {lineno}: expected 2 columns, got {len(cells)}")
        for cell in cells:
            if not _is_number(cell):
                raise InputError(f"{path}: line {lineno}: not a number: {cell!r}")
        xs.append(float(cells[0]))
        ys.append(float(cells[1]))
    if not xs:
        raise InputError(f"{path}: no data rows")
    return PairedSample(np.array(xs), np.array(ys))


def parse_table(path: str) -> PairedSample:
    """Count-matrix input expanded to categorical pairs.

    Accepts an optional label row and label column; row index is the
    first margin (scores 1..I), column index the second (1..J).
    """
    if path == "bundled:mental-health":
        return mental_health()
    if path.startswith(("bundled:", "demo:")):
        raise InputError(f"{path!r} is not a count table")
    rows = _read_rows(path)
    col_labels = None
    # a header row announces itself by non-numeric cells after the
    # first; a row-labeled count row has numbers there
    first = rows[0][1]
    if len(first) >= 2 and not all(_is_number(c) for c in first[1:]):
        col_labels = first
        rows = rows[1:]
        if not rows:
            raise InputError(f"{path}: header but no count rows")
    row_labels: list[str] = []
    counts: list[list[int]] = []
    labeled = not _is_number(rows[0][1][0])
    for lineno, cells in rows:
        if labeled:
            if _is_number(cells[0]):
                raise InputError(f"{path}: line {lineno}: expected a row label first")
            row_labels.append(cells[0])
            cells = cells[1:]
        row = []
        for cell in cells:
            if not _is_number(cell):
                raise InputError(f"{path}: line {lineno}: not a number: {cell!r}")
            value = float(cell)
            if value < 0:
                raise InputError(f"{path}: line {lineno}: negative count {cell}")
            if value != int(value):
                raise InputError(f"{path}: line {lineno}: count is not an integer: {cell}")
            row.append(int(value))
        if counts and len(row) != len(counts[0]):
            raise InputError(f"{path}: line {lineno}: expected {len(counts[0])} counts, got {len(row)}")
        if not row:
            raise InputError(f"{path}: line {lineno}: no counts in row")
        counts.append(row)
    width = len(counts[0])
    if col_labels is not None:
        if len(col_labels) == width + 1 and row_labels:
            col_labels = col_labels[1:]
        elif len(col_labels) != width:
            raise InputError(f"{path}: header has {len(col_labels)} cells for {width} columns")
    table = np.array(counts, dtype=float)
    if table.sum() == 0:
        raise InputError(f"{path}: table has no observations")
    return expand_counts(table, row_labels or None, col_labels)


def _load_input(path: str, as_table: bool) -> PairedSample:
    return parse_table(path) if as_table else load_pairs(path)


# ---------------------------------------------------------------------------
# Shared report plumbing

def _capture_estimates(s: PairedSample) -> tuple[float, float, float, list[str]]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        kv = estimate_kappa(s, "v")
        ku = estimate_kappa(s, "u")
        rs = rho_star(s, "v")
    return kv, ku, rs, [str(w.message) for w in caught]


def _component_entries(s: PairedSample, max_k: int | None, max_l: int | None,
                       alpha: float) -> list[dict]:
    comps = component_correlations(s)
    tests = component_tests(comps, s.n, alpha)
    out = []
    for comp, test in zip(comps, tests):
        if max_k is not None and comp.k > max_k:
            continue
        if max_l is not None and comp.l > max_l:
            continue
        out.append({
            "k": comp.k, "l": comp.l,
            "lam": comp.lam, "mu": comp.mu, "rho": comp.rho,
            "raw_p": test.raw_p, "adjusted_p": test.adjusted_p,
            "significant": test.significant,
        })
    return out


def _maybe_grade(s: PairedSample, grade: str | None) -> PairedSample:
    return grade_transform(s, grade, grade) if grade else s


def _require_seed(cfg: RunConfig, what: str) -> int:
    if cfg.seed is None:
        raise InputError(f"--seed is required for {what}")
    return cfg.seed


def _run_test(s: PairedSample, cfg: RunConfig, args) -> tuple:
    """Run the requested independence test; (statistic, p, method, reps, seed)."""
    stat_name = args.stat
    if cfg.method == "perm":
        if args.exhaustive:
            res = permutation_test(s, stat_name, exhaustive=True)
            return res.statistic, res.p_value, f"permutation-exhaustive-{stat_name}", res.replicates, None
        if cfg.B < 99:
            raise InputError("B must be at least 99")
        seed = _require_seed(cfg, "a random permutation test")
        res = permutation_test(s, stat_name, B=cfg.B, seed=seed, threads=cfg.threads)
        return res.statistic, res.p_value, f"permutation-{stat_name}", res.replicates, seed
    if cfg.method == "asymp":
        if stat_name not in ("kappa_v", "kappa_u"):
            raise InputError("the asymptotic null is only available for kappa statistics")
        seed = _require_seed(cfg, "the Monte Carlo asymptotic null")
        mode = "v" if stat_name == "kappa_v" else "u"
        kappa_hat = estimate_kappa(s, mode)
        lam = _margin_eigensystem(s.x)[0].eigenvalues
        mu = _margin_eigensystem(s.y)[0].eigenvalues
        res = asymptotic_pvalue(s.n, kappa_hat, lam, mu, mode=mode,
                                draws=cfg.draws, seed=seed, threads=cfg.threads)
        return res.statistic, res.p_value, f"asymptotic-{stat_name}", res.replicates, seed
    return None, None, "estimate", None, cfg.seed


def _standard_report(s: PairedSample, cfg: RunConfig, args,
                     with_components: bool) -> dict:
    kv, ku, rs, warn = _capture_estimates(s)
    statistic, p_value, method, replicates, seed = _run_test(s, cfg, args)
    comps = []
    if with_components:
        comps = _component_entries(s, cfg.max_k, cfg.max_l, args.alpha)
    return {
        "n": s.n,
        "kappa_v": kv,
        "kappa_u": ku,
        "rho_star": rs,
        "statistic": statistic,
        "p_value": p_value,
        "method": method,
        "replicates": replicates,
        "seed": seed,
        "grade": cfg.grade,
        "components": comps,
        "warnings": warn,
        "timestamp": _timestamp(),
    }


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_test(cfg: RunConfig, args) -> int:
    s = _maybe_grade(_load_input(cfg.input, as_table=False), cfg.grade)
    _emit(_standard_report(s, cfg, args, with_components=False), cfg.out)
    return 0


def _cmd_table(cfg: RunConfig, args) -> int:
    s = _maybe_grade(_load_input(cfg.input, as_table=True), cfg.grade)
    with_components = cfg.max_k is not None or cfg.max_l is not None
    _emit(_standard_report(s, cfg, args, with_components), cfg.out)
    return 0


def _cmd_components(cfg: RunConfig, args) -> int:
    s = _maybe_grade(_load_input(cfg.input, as_table=args.table), cfg.grade)
    kv, ku, rs, warn = _capture_estimates(s)
    report = {
        "n": s.n,
        "kappa_v": kv,
        "kappa_u": ku,
        "rho_star": rs,
        "statistic": None,
        "p_value": None,
        "method": "components",
        "replicates": None,
        "seed": cfg.seed,
        "grade": cfg.grade,
        "components": _component_entries(s, cfg.max_k, cfg.max_l, args.alpha),
        "warnings": warn,
        "timestamp": _timestamp(),
    }
    _emit(report, cfg.out)
    return 0


def _cmd_weights(cfg: RunConfig, args) -> int:
    s = _maybe_grade(_load_input(cfg.input, as_table=args.table), cfg.grade)
    if args.component is None:
        w = weights_overall(s, cells=args.cells)
        method = "weights-overall"
    else:
        k, l = args.component
        w = weights_component(s, k, l, cells=args.cells)
        method = f"weights-component-{k}-{l}"
    files = []
    for path, writer in ((cfg.plot, render_scatter_svg),
                         (cfg.csv, write_weights_csv),
                         (cfg.fig, render_scatter_fig)):
        if path is None:
            continue
        try:
            if writer is write_weights_csv:
                writer(w, path)
            else:
                writer(s, w, path)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc.strerror}") from exc
        files.append(path)
    kv, ku, rs, warn = _capture_estimates(s)
    report = {
        "n": s.n,
        "kappa_v": kv,
        "kappa_u": ku,
        "rho_star": rs,
        "statistic": None,
        "p_value": None,
        "method": method,
        "replicates": None,
        "seed": cfg.seed,
        "grade": cfg.grade,
        "target": w.target,
        "files": files,
        "components": [],
        "warnings": warn,
        "timestamp": _timestamp(),
    }
    _emit(report, cfg.out)
    return 0


def _cmd_eigen(cfg: RunConfig, args) -> int:
    family = get_family(args.dist)
    if args.t < 2:
        raise InputError("t must be at least 2")
    system = eigensystem_tridiag(discretize(family, args.t))
    lam = system.eigenvalues
    total = float(lam.sum())
    top = lam[: args.top]
    report = {
        "family": family.name,
        "t": args.t,
        "count": int(lam.size),
        "sum_lambda": total,
        "sum_lambda_sq": float(lam @ lam),
        "lambda": [float(v) / total for v in top],
        "lambda_raw": [float(v) for v in top],
        "timestamp": _timestamp(),
    }
    _emit(report, cfg.out)
    return 0


def _load_ksample(path: str) -> tuple[KSampleData, np.ndarray, np.ndarray]:
    """CSV of value,group rows -> (KSampleData, values, group codes)."""
    rows = _read_rows(path)
    start = 1 if not _is_number(rows[0][1][0]) else 0
    values, labels = [], []
    for lineno, cells in rows[start:]:
        if len(cells) != 2:
            raise InputError(f"{path}: line {lineno}: expected 2 columns, got {len(cells)}")
        if not _is_number(cells[0]):
            raise InputError(f"{path}: line {lineno}: not a number: {cells[0]!r}")
        values.append(float(cells[0]))
        labels.append(cells[1])
    if not values:
        raise InputError(f"{path}: no data rows")
    order: dict[str, int] = {}
    for label in labels:
        order.setdefault(label, len(order) + 1)
    if len(order) < 2:
        raise InputError(f"{path}: need at least 2 groups, found {len(order)}")
    codes = np.array([order[label] for label in labels], dtype=float)
    values_arr = np.array(values)
    groups = tuple(values_arr[codes == code] for code in range(1, len(order) + 1))
    data = KSampleData(np.arange(1, len(order) + 1, dtype=float), groups)
    return data, values_arr, codes


def _cmd_ksample(cfg: RunConfig, args) -> int:
    data, values, codes = _load_ksample(cfg.input)
    statistic = ksample_kappa(data, grade=cfg.grade)
    if cfg.grade is not None:
        values = grade_scale(cfg.grade).quantile(mid_cdf(values, values))
    s = PairedSample(values, codes)
    kv, ku, rs, warn = _capture_estimates(s)
    if cfg.seed is not None:
        if cfg.B < 99:
            raise InputError("B must be at least 99")
        res = permutation_test(s, "kappa_v", B=cfg.B, seed=cfg.seed, threads=cfg.threads)
        p_value, method, replicates = res.p_value, "ksample-permutation", res.replicates
    else:
        p_value, method, replicates = None, "ksample-estimate", None
    report = {
        "n": s.n,
        "kappa_v": kv,
        "kappa_u": ku,
        "rho_star": rs,
        "statistic": statistic,
        "p_value": p_value,
        "method": method,
        "replicates": replicates,
        "seed": cfg.seed,
        "grade": cfg.grade,
        "groups": len(data.groups),
        "components": [],
        "warnings": warn,
        "timestamp": _timestamp(),
    }
    _emit(report, cfg.out)
    return 0


def _cmd_frechet(cfg: RunConfig, args) -> int:
    segments = frechet_curves(args.k, args.l, args.sign)
    report = {
        "k": args.k,
        "l": args.l,
        "sign": args.sign,
        "segments": [[x0, y0, x1, y1] for (x0, y0), (x1, y1) in segments],
        "timestamp": _timestamp(),
    }
    _emit(report, cfg.out)
    return 0


def _cmd_demo(cfg: RunConfig, args) -> int:
    s = gen_demo_data(args.kind, args.n, _require_seed(cfg, "demo data"))
    lines = ["x,y"]
    lines += [f"{x:.17g},{y:.17g}" for x, y in zip(s.x, s.y)]
    text = "\n".join(lines) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.out}: {exc.strerror}") from exc
    return 0


# ---------------------------------------------------------------------------
# Argument parsing

def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        if flag < 1:
            raise InputError("--threads must be at least 1")
        return flag
    env = os.environ.get("RHOSTAR_THREADS")
    if env:
        if not env.isdigit() or int(env) < 1:
            raise InputError(f"RHOSTAR_THREADS must be a positive integer, got {env!r}")
        return int(env)
    return os.cpu_count() or 1


def _add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("input", help="CSV path, bundled:mental-health, or demo:KIND,n=N,seed=S")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="random seed (required when randomness is used)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker pool size (default: RHOSTAR_THREADS or all cores)")
    p.add_argument("--grade", choices=_GRADE_CHOICES, default=None,
                   help="grade-transform the margins through this scale first")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhostar",
        description="Dependence measurement and independence testing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="independence test on paired data")
    _add_common(p)
    p.add_argument("--method", choices=("perm", "asymp", "none"), default="perm")
    p.add_argument("--stat", choices=("kappa_v", "kappa_u", "rho_star_v"), default="kappa_v")
    p.add_argument("--B", type=int, default=999, help="permutation replicates (at least 99)")
    p.add_argument("--draws", type=int, default=100000, help="Monte Carlo draws for the asymptotic null")
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate all permutations (small n only)")

    p = sub.add_parser("table", help="analyze a count table")
    _add_common(p)
    p.add_argument("--method", choices=("perm", "asymp", "none"), default="none")
    p.add_argument("--stat", choices=("kappa_v", "kappa_u", "rho_star_v"), default="kappa_v")
    p.add_argument("--B", type=int, default=999)
    p.add_argument("--draws", type=int, default=100000)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-k", type=int, default=None, help="include components up to this row index")
    p.add_argument("--max-l", type=int, default=None, help="include components up to this column index")
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("components", help="component correlations and tests")
    _add_common(p)
    p.add_argument("--table", action="store_true", help="input is a count table")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--max-l", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("weights", help="association weights and plots")
    _add_common(p)
    p.add_argument("--table", action="store_true", help="input is a count table")
    p.add_argument("--component", nargs=2, type=int, metavar=("K", "L"), default=None)
    p.add_argument("--cells", action="store_true", help="aggregate weights onto the support grid")
    p.add_argument("--plot", help="write a deterministic SVG here")
    p.add_argument("--csv", help="write index,x,y,weight rows here")
    p.add_argument("--fig", help="write a matplotlib figure here (png/pdf)")

    p = sub.add_parser("eigen", help="spectrum of a discretized family")
    p.add_argument("--dist", required=True, choices=_GRADE_CHOICES)
    p.add_argument("--t", type=int, required=True, help="number of equiprobable atoms")
    p.add_argument("--top", type=int, default=10, help="how many eigenvalues to list")
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("ksample", help="K-sample comparison from value,group rows")
    _add_common(p)
    p.add_argument("--B", type=int, default=999)

    p = sub.add_parser("frechet", help="maximum-association support curves")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("demo", help="emit generated demo data as CSV")
    p.add_argument("--kind", choices=("a", "b", "c", "d"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, help="generator seed (required)")
    p.add_argument("--out", help="write the CSV here instead of stdout")

    return parser


_DISPATCH = {
    "test": _cmd_test,
    "table": _cmd_table,
    "components": _cmd_components,
    "weights": _cmd_weights,
    "eigen": _cmd_eigen,
    "ksample": _cmd_ksample,
    "frechet": _cmd_frechet,
    "demo": _cmd_demo,
}


def _make_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        method=getattr(args, "method", None),
        B=getattr(args, "B", 999),
        draws=getattr(args, "draws", 100000),
        seed=getattr(args, "seed", None),
        max_k=getattr(args, "max_k", None),
        max_l=getattr(args, "max_l", None),
        grade=getattr(args, "grade", None),
        out=getattr(args, "out", None),
        plot=getattr(args, "plot", None),
        csv=getattr(args, "csv", None),
        fig=getattr(args, "fig", None),
        threads=_resolve_threads(getattr(args, "threads", None)),
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](_make_config(args), args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateMarginError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
