"""Command-line front end.

Subcommands: sample, enumerate, count, grid, roundtrip, estimate-z, bounds,
render, validate. Report commands write delimited output plus an optional
matplotlib figure alongside; every file artifact gets a reproducibility
manifest sidecar. Exit codes: 0 success, 1 domain error (error name on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from .enumeration import DEFAULT_BUDGET, count_survey, enumerate_all, grid_lines
from .errors import TTessError
from .geometry import choose_time_axis, sample_poisson_lines, unit_square
from .gibbs import (
    FourKBound,
    RateBound,
    estimate_partition,
    parse_energy,
    partition_series_bound,
)
from .io import (
    TOOL_VERSION,
    dump_json,
    file_sha256,
    load_lineset,
    load_tessellation_ref,
    save_lineset,
    save_tessellation_lines,
    tessellation_to_dict,
    write_manifest,
)
from .reconstruct import extract_scheme1, extract_scheme2, rebuild_from_scheme1, \
    rebuild_from_scheme2
from .render import render_svg
from .tessellation import birth_tree, validate


def _env_seed() -> int:
    return int(os.environ.get("TTESS_SEED", "0"))


def _load_window(path) -> tuple:
    if path is None:
        return unit_square()
    return tuple((float(x), float(y)) for x, y in json.loads(Path(path).read_text()))


def _plot_path(args):
    if args.plot is None:
        return None
    if args.plot is not True:
        return Path(args.plot)
    if not getattr(args, "out", None):
        raise TTessError("--plot without a path needs --out to derive one from")
    return Path(args.out).with_suffix(".png")


def _manifest(args, out, seeds, inputs, started) -> None:
    payload = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k != "func" and not callable(v)
    }
    write_manifest(out, args.command, payload, seeds, inputs,
                   time.monotonic() - started)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_sample(args) -> int:
    started = time.monotonic()
    verts = _load_window(args.window)
    lines = sample_poisson_lines(args.tau, verts, seed=args.seed)
    window = choose_time_axis(lines, verts, seed=args.seed)
    print(f"sampled {len(lines)} lines (tau={args.tau}, seed={args.seed})")
    if args.out:
        save_lineset(args.out, lines, verts, axis=window.time_axis, seed=args.seed)
        _manifest(args, args.out, [args.seed],
                  [args.window] if args.window else [], started)
    else:
        sys.stdout.write(dump_json(
            {"window": [list(v) for v in verts],
             "lines": [{"id": l.id, "alpha": l.alpha, "p": l.p} for l in lines],
             "axis": list(window.time_axis), "seed": args.seed}
        ))
    return 0


def cmd_enumerate(args) -> int:
    started = time.monotonic()
    _, _, table = load_lineset(args.lines)
    tessellations = enumerate_all(table, budget=args.budget)
    if args.out:
        save_tessellation_lines(args.out, tessellations)
        _manifest(args, args.out, [], [args.lines], started)
        print(f"enumerated {len(tessellations)} tessellations -> {args.out}")
    else:
        for tess in tessellations:
            sys.stdout.write(json.dumps(tessellation_to_dict(tess),
                                        sort_keys=True,
                                        separators=(",", ":")) + "\n")
    return 0


def cmd_count(args) -> int:
    started = time.monotonic()
    survey = count_survey(args.k, args.trials, seed=args.seed, budget=args.budget)
    rows = [
        [trial, args.k, count, args.seed]
        for trial, count in enumerate(survey.counts)
    ]
    bound = (4 * args.k) ** args.k
    print(f"max count over {args.trials} trials: {survey.max_count} "
          f"(upper bound (4k)^k = {bound})")
    if args.out:
        _write_csv(args.out, ["trial", "k", "count", "seed"], rows)
        _manifest(args, args.out, [args.seed], [], started)
    plot = _plot_path(args)
    if plot:
        from .figures import save_count_figure

        save_count_figure(survey, plot)
        print(f"figure -> {plot}")
    return 0


def cmd_grid(args) -> int:
    started = time.monotonic()
    lines = grid_lines(args.k, args.a)
    window = choose_time_axis(lines, unit_square(), seed=args.seed)
    if args.out:
        save_lineset(args.out, lines, unit_square(), axis=window.time_axis,
                     seed=args.seed)
        _manifest(args, args.out, [args.seed], [], started)
    if args.enumerate:
        from .geometry import build_event_table

        table = build_event_table(lines, window)
        count = len(enumerate_all(table, budget=args.budget))
        bound = (args.k - args.a + 1) ** args.a
        print(f"grid k={args.k} a={args.a}: {count} tessellations")
        print(f"count >= {bound}: {count >= bound}")
    else:
        print(f"grid k={args.k} a={args.a}: {len(lines)} lines")
    return 0


def cmd_roundtrip(args) -> int:
    started = time.monotonic()
    _, _, table = load_lineset(args.lines)
    tessellations = enumerate_all(table, budget=args.budget)
    rows = []
    for index, tess in enumerate(tessellations):
        leaves = len(birth_tree(tess, table).leaves)
        if args.scheme == 1:
            rebuilt = rebuild_from_scheme1(table, extract_scheme1(tess, table))
            rows.append({
                "tess_index": index, "scheme": 1,
                "ok": rebuilt.marks() == tess.marks(),
                "orphan_count": 0, "leaves": leaves, "rounds": 1,
                "refinements": 0, "flagged": False,
            })
        else:
            cert = extract_scheme2(tess, table)
            rebuilt = rebuild_from_scheme2(table, cert.scheme).pretessellation
            rows.append({
                "tess_index": index, "scheme": 2,
                "ok": rebuilt.marks() == tess.marks(),
                "orphan_count": cert.orphan_count, "leaves": leaves,
                "rounds": cert.rounds_total, "refinements": cert.refinements,
                "flagged": cert.flagged,
            })
    exact = sum(1 for r in rows if r["ok"])
    print(f"scheme {args.scheme}: {exact}/{len(rows)} exact round-trips")
    header = ["tess_index", "scheme", "ok", "orphan_count", "leaves",
              "rounds", "refinements", "flagged"]
    if args.out:
        _write_csv(
            args.out, header,
            [[r["tess_index"], r["scheme"], str(r["ok"]).lower(),
              r["orphan_count"], r["leaves"], r["rounds"], r["refinements"],
              str(r["flagged"]).lower()] for r in rows],
        )
        _manifest(args, args.out, [], [args.lines], started)
    plot = _plot_path(args)
    if plot:
        from .figures import save_roundtrip_figure

        save_roundtrip_figure(rows, plot)
        print(f"figure -> {plot}")
    return 0


def cmd_estimate_z(args) -> int:
    started = time.monotonic()
    model = parse_energy(args.energy)
    plot = _plot_path(args)
    estimate = estimate_partition(
        model, args.tau, n_samples=args.samples, k_cap=args.k_cap,
        seed=args.seed, budget=args.budget, keep_samples=plot is not None,
    )
    payload = estimate.to_dict()
    payload["energy"] = args.energy
    print(f"z_hat = {estimate.z_hat:.6f} +/- {estimate.std_error:.6f} "
          f"(skipped {estimate.skipped_oversize}/{estimate.samples} oversize)")
    if args.out:
        Path(args.out).write_text(dump_json(payload))
        _manifest(args, args.out, [args.seed], [], started)
    else:
        sys.stdout.write(dump_json(payload))
    if plot:
        from .figures import save_estimate_figure

        save_estimate_figure(estimate, plot)
        print(f"figure -> {plot}")
    return 0


def _parse_bound(text: str):
    if text == "fourk":
        return FourKBound()
    if text.startswith("thm1:"):
        eps, _, const = text[len("thm1:"):].partition(",")
        return RateBound(epsilon=float(eps), constant=float(const or 1.0))
    raise TTessError(f"unknown bound {text!r} (expected fourk or thm1:eps,const)")


def cmd_bounds(args) -> int:
    started = time.monotonic()
    series = partition_series_bound(args.C, args.tau, args.k_max,
                                    _parse_bound(args.bound))
    print(f"partial sum = {series.total:.6g} (log = {series.log_total:.6f}), "
          f"terms decreasing at k_max: {series.tail_decreasing}")
    rows = [
        [k, f"{series.terms[k]:.12g}", f"{series.log_terms[k]:.12f}"]
        for k in range(len(series.terms))
    ]
    if args.out:
        _write_csv(args.out, ["k", "term", "log_term"], rows)
        _manifest(args, args.out, [], [], started)
    plot = _plot_path(args)
    if plot:
        from .figures import save_bounds_figure

        save_bounds_figure(series, plot)
        print(f"figure -> {plot}")
    return 0


def cmd_render(args) -> int:
    started = time.monotonic()
    _, _, table = load_lineset(args.lines)
    tess = None
    if args.tess:
        tess = load_tessellation_ref(args.tess, table,
                                     lines_hash=file_sha256(args.lines))
    svg = render_svg(table, tess)
    Path(args.out).write_text(svg)
    inputs = [args.lines]
    if args.tess:
        inputs.append(str(args.tess).rpartition(":")[0]
                      if ":" in str(args.tess) and str(args.tess).rsplit(":", 1)[-1].isdigit()
                      else args.tess)
    _manifest(args, args.out, [], inputs, started)
    print(f"rendered -> {args.out}")
    return 0


def cmd_validate(args) -> int:
    _, _, table = load_lineset(args.lines)
    tess = load_tessellation_ref(args.tess, table,
                                 lines_hash=file_sha256(args.lines))
    report = validate(tess, table)
    print(f"classification: {report.classification.value}")
    for violation in report.violations:
        where = f" at event {violation.event}" if violation.event is not None else ""
        print(f"  violated: {violation.clause}{where} "
              f"(lines {', '.join(map(str, violation.lines))})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttess",
        description="T-tessellations on fixed line sets: enumeration, "
                    "reconstruction and Gibbs mass estimation.",
    )
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample, help="draw a Poisson line set")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--window", help="JSON file with polygon vertices")
    p.add_argument("--out", help="line-set JSON to write")

    p = add("enumerate", cmd_enumerate, help="enumerate all T-tessellations")
    p.add_argument("--lines", required=True)
    p.add_argument("--out", help="JSON-lines output (default: stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("count", cmd_count, help="survey counts over random line sets")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--out", help="CSV report")
    p.add_argument("--plot", nargs="?", const=True, help="PNG figure")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("grid", cmd_grid, help="the adversarial grid construction")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--out", help="line-set JSON to write")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("roundtrip", cmd_roundtrip,
            help="extract a labelling scheme from every tessellation and rebuild")
    p.add_argument("--lines", required=True)
    p.add_argument("--scheme", type=int, choices=(1, 2), required=True)
    p.add_argument("--out", help="CSV report")
    p.add_argument("--plot", nargs="?", const=True, help="PNG figure")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("estimate-z", cmd_estimate_z, help="Monte-Carlo Gibbs mass estimate")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--energy", default="nlines:0.0",
                   help="e.g. nlines:0.5 or nlines:0.5,area:1.0")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--k-cap", type=int, default=9)
    p.add_argument("--seed", type=int, default=_env_seed())
    p.add_argument("--out", help="JSON report")
    p.add_argument("--plot", nargs="?", const=True, help="PNG figure")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = add("bounds", cmd_bounds, help="evaluate the mass series upper bound")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--C", type=float, default=0.0,
                   help="stability constant in H >= -C #lines")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--bound", default="fourk", help="fourk or thm1:eps,const")
    p.add_argument("--out", help="CSV of terms")
    p.add_argument("--plot", nargs="?", const=True, help="PNG figure")

    p = add("render", cmd_render, help="deterministic SVG snapshot")
    p.add_argument("--lines", required=True)
    p.add_argument("--tess", help="tessellation JSON, or file.jsonl:INDEX")
    p.add_argument("--out", required=True)

    p = add("validate", cmd_validate, help="classify a tessellation file")
    p.add_argument("--lines", required=True)
    p.add_argument("--tess", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TTessError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
