"""Command-line front end.

Subcommands: ``generate`` (write an edge-list file), ``compute`` (one
network or scenario evaluation), ``sweep`` (parameter sweeps to CSV,
including the figure presets). Exit codes: 0 success, 2 usage error,
3 I/O failure, 4 graph validation failure.

CSV conventions: '.' decimal point, ',' separator, LF line endings, header
row always present, floats with 12 significant digits, ``# key: value``
metadata lines before the header. Output files are written to a temporary
file and renamed, so partial files are never left behind.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import shlex
import sys
import tempfile
from fractions import Fraction
from math import comb

import numpy as np

from . import __version__, analytic
from .fidelity import average_max_fidelity, effective_path_length
from .network import (
    CANONICAL_FAMILIES,
    GraphError,
    MEPlacement,
    TREE_FAMILIES,
    TopologySpec,
    TopologySpecError,
    WeightError,
    edge_skeleton,
    format_edge_list,
    generate,
    load_edge_list,
    save_edge_list,
)
from .scenarios import (
    RNG_ALGORITHM,
    SweepResult,
    advantage_region,
    decoherence_sweep,
    default_sample_count,
    large_N_limit_check,
    resolve_threads,
    run_scenario_A,
    run_scenario_B,
    run_scenario_C,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_GRAPH = 4

PRESETS = ("fig2", "fig3a", "fig3b", "fig3c", "fig3def", "fig4", "fig5")
SWEEP_KINDS = ("p", "m", "N", "d", "pm-grid")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(result: SweepResult, path: str) -> None:
    lines = [f"# {key}: {value}" for key, value in result.metadata.items()]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_family_token(token: str) -> tuple[str, int | None]:
    """'chain' -> ('chain', None); 'flower:3' -> ('flower', 3)."""
    if ":" in token:
        name, _, rest = token.partition(":")
        try:
            return name.strip(), int(rest)
        except ValueError:
            raise TopologySpecError(f"bad family token {token!r}")
    return token.strip(), None


def _spec_from(family: str, n: int, k: int | None) -> TopologySpec:
    if family == "flower":
        if k is None:
            raise TopologySpecError("flower requires k (use --k or 'flower:K')")
        return TopologySpec.flower(n, k)
    return TopologySpec(family, n)


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# --- generate ----------------------------------------------------------------


def _weights_from_args(args) -> object:
    if args.weights is not None:
        return _parse_float_list(args.weights)
    if args.me_links is not None:
        if args.p is None:
            raise WeightError("--me-links requires --p for the remaining links")
        return MEPlacement(tuple(_parse_int_list(args.me_links)), args.p)
    if args.p is None:
        raise WeightError("provide --p, --weights, or --me-links with --p")
    return args.p


def cmd_generate(args) -> int:
    spec = _spec_from(args.family, args.n, args.k)
    net = generate(spec, _weights_from_args(args))
    if args.out:
        save_edge_list(net, args.out)
    else:
        sys.stdout.write(format_edge_list(net))
    return EXIT_OK


# --- compute -----------------------------------------------------------------


def _pair_rows(records):
    return [
        {
            "source": r.source,
            "target": r.target,
            "product": r.product,
            "fidelity": r.fidelity,
            "degeneracy": r.degeneracy,
            "path": "-".join(str(x) for x in r.best_path),
        }
        for r in records
    ]


def _analytic_fraction(family, n, k, p):
    """Exact rational value when p has a small exact binary representation."""
    frac = Fraction(p)
    if frac.denominator > 1024:
        return None
    return analytic.uniform_value(family, n, k, frac)


def _compute_network(args, net, family=None, n=None, k=None, p=None):
    doc: dict = {}
    nf = average_max_fidelity(net)
    doc["f_avg"] = nf.avg_max_fidelity
    if family in CANONICAL_FAMILIES and p is not None:
        value = float(analytic.uniform_value(family, n, k, p))
        doc["analytic"] = value
        doc["analytic_abs_diff"] = abs(nf.avg_max_fidelity - value)
        exact = _analytic_fraction(family, n, k, p)
        if exact is not None:
            doc["analytic_exact"] = f"{exact.numerator}/{exact.denominator}"
    if args.eff_length:
        doc["effective_path_length"] = effective_path_length(net)
    if args.pairs:
        doc["pairs"] = _pair_rows(nf.pair_records)
    return doc


def _estimate_doc(est) -> dict:
    return {
        "f_avg_mean": est.mean,
        "std_error": est.std_error,
        "sample_count": est.sample_count,
        "f_min": est.sample_min,
        "f_max": est.sample_max,
        "spread_std": est.spread_std,
    }


def cmd_compute(args) -> int:
    threads = resolve_threads(args.threads)
    if args.graph:
        net = load_edge_list(args.graph)
        doc = _compute_network(args, net)
    else:
        if args.family is None:
            raise TopologySpecError("provide --graph or --family")
        spec = _spec_from(args.family, args.n, args.k)
        scenario = args.scenario or "A"
        if scenario == "A":
            if args.p is None:
                raise TopologySpecError("scenario A requires --p")
            net = generate(spec, args.p)
            doc = _compute_network(
                args, net, family=spec.family, n=spec.n, k=spec.k, p=args.p
            )
        elif scenario == "B":
            if args.p is None or args.me_count is None:
                raise TopologySpecError("scenario B requires --p and --me-count")
            est = run_scenario_B(
                spec,
                args.p,
                args.me_count,
                mode=args.placement_mode,
                samples=args.placements,
                seed=args.seed,
            )
            doc = _estimate_doc(est)
            doc["placement_mode"] = args.placement_mode
            if spec.family in TREE_FAMILIES:
                doc["analytic"] = float(
                    analytic.me_value(spec.family, spec.n, spec.k, args.me_count, args.p)
                )
        else:  # scenario C
            samples = args.samples or default_sample_count(spec.n)
            est = run_scenario_C(spec, samples, seed=args.seed, threads=threads)
            doc = _estimate_doc(est)
            doc["seed"] = args.seed
            doc["rng"] = RNG_ALGORITHM
    _emit_compute(doc, args.format)
    return EXIT_OK


def _emit_compute(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2))
        return
    if fmt == "csv":
        pairs = doc.get("pairs")
        if pairs:
            cols = ("source", "target", "product", "fidelity", "degeneracy", "path")
            print(",".join(cols))
            for row in pairs:
                print(",".join(_fmt(row[c]) for c in cols))
        else:
            keys = [k for k in doc if k != "pairs"]
            print(",".join(keys))
            print(",".join(_fmt(doc[k]) for k in keys))
        return
    for key, value in doc.items():
        if key == "pairs":
            continue
        if key == "f_avg" or key == "f_avg_mean":
            print(f"{key} {value:.6f}")
        else:
            print(f"{key} {_fmt(value)}")
    if "analytic_exact" in doc and "analytic_abs_diff" in doc:
        print(
            f"analytic {doc['analytic_exact']}, diff {_fmt(doc['analytic_abs_diff'])}"
        )
    pairs = doc.get("pairs")
    if pairs:
        print("pairs:")
        print("source target product fidelity degeneracy path")
        for row in pairs:
            print(
                f"{row['source']} {row['target']} {_fmt(row['product'])} "
                f"{_fmt(row['fidelity'])} {row['degeneracy']} {row['path']}"
            )


# --- sweep -------------------------------------------------------------------


def _sweep_metadata(args, argv) -> dict:
    meta = {
        "generator": f"qnetfid {__version__}",
        "command": shlex.join(argv),
        "seed": str(args.seed),
        "rng": RNG_ALGORITHM,
    }
    if not args.no_timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return meta


def _families_from_args(args, default: str) -> list[tuple[str, int | None]]:
    text = args.families or args.family or default
    out = []
    for token in text.split(","):
        family, k = _parse_family_token(token)
        if family == "flower" and k is None:
            k = args.k
        out.append((family, k))
    return out


def _sweep_p(args) -> SweepResult:
    families = _families_from_args(args, "chain,star")
    points = args.points or 101
    n = args.n or 10
    result = SweepResult(("family", "k", "n", "p", "f", "f_analytic", "abs_diff"))
    for family, k in families:
        spec = _spec_from(family, n, k)
        for p in np.linspace(0.0, 1.0, points):
            nf = run_scenario_A(spec, float(p))
            result.append(
                family, k, n, float(p), nf.avg_max_fidelity,
                nf.analytic_value, nf.analytic_abs_diff,
            )
    return result


def _sweep_m(args) -> SweepResult:
    families = _families_from_args(args, "chain,star")
    n = args.n or 10
    p = args.p if args.p is not None else 0.5
    result = SweepResult(
        (
            "family", "k", "n", "p", "m_links", "m", "f_mean", "f_min",
            "f_max", "f_std", "std_error", "placements", "f_analytic", "method",
        )
    )
    for family, k in families:
        spec = _spec_from(family, n, k)
        links = len(edge_skeleton(spec))
        for m_links in range(links + 1):
            mode = "exhaustive" if comb(links, m_links) <= args.placement_cap else "sample"
            est = run_scenario_B(
                spec, p, m_links, mode=mode, samples=args.samples or 1000,
                seed=args.seed, max_exhaustive=args.placement_cap,
            )
            f_analytic = (
                float(analytic.me_value(family, n, k, m_links, p))
                if family in TREE_FAMILIES
                else None
            )
            result.append(
                family, k, n, p, m_links, m_links / links, est.mean,
                est.sample_min, est.sample_max, est.spread_std,
                est.std_error, est.sample_count, f_analytic, mode,
            )
    return result


def _sweep_N(args) -> SweepResult:
    n_values = _parse_int_list(args.n_list) if args.n_list else [10, 20, 50, 100, 200, 500]
    if args.family or args.p is not None or args.m is not None:
        family, k = _parse_family_token(args.family or "chain")
        if family == "flower" and k is None:
            k = args.k
        cases = [(family, k, args.p if args.p is not None else 0.5,
                  args.m if args.m is not None else 0.6)]
    else:
        cases = [
            (family, None, p, m)
            for family in ("star", "chain")
            for p, m in ((0.5, 0.6), (0.9, 0.6), (0.5, 0.5), (0.5, 0.9))
        ]
    result = SweepResult(("family", "p", "m", "n", "m_links", "f", "f_minus_half"))
    for family, k, p, m in cases:
        table = large_N_limit_check(family, p, m, n_values, k=k, check=False)
        result.rows.extend(table.rows)
    return result


def _sweep_d(args) -> SweepResult:
    families = tuple(
        family for family, _ in _families_from_args(args, "chain,star,ring,complete")
    )
    d_values = tuple(
        float(d)
        for d in np.arange(args.d_min, args.d_max + args.d_step / 2, args.d_step)
    )
    return decoherence_sweep(
        families=families,
        n=args.n or 8,
        alpha=args.alpha,
        p_det=args.p_det,
        d_values=d_values,
        flower_k=args.k,
    )


def _sweep_pm_grid(args) -> SweepResult:
    families = _families_from_args(args, "star")
    points = args.points or 101
    grid = np.linspace(0.0, 1.0, points)
    threads = resolve_threads(args.threads)
    result = None
    for family, k in families:
        spec = _spec_from(family, args.n or 100, k)
        part = advantage_region(
            spec, p_values=grid, m_values=grid, mode=args.mode,
            samples=args.samples or 200, seed=args.seed,
            max_exhaustive=args.placement_cap, threads=threads,
        )
        if result is None:
            result = part
        else:
            result.rows.extend(part.rows)
    return result


def _sweep_fig2(args) -> SweepResult:
    n = args.n or 7
    p = args.p if args.p is not None else 0.5
    samples = args.samples or default_sample_count(n)
    threads = resolve_threads(args.threads)
    families = _families_from_args(args, "chain,flower:1,flower:2,flower:3,star")
    result = SweepResult(
        (
            "scenario", "family", "k", "n", "p", "m_links", "m", "placements",
            "samples", "avg_path_length", "f_mean", "f_min", "f_max",
            "f_std", "std_error",
        )
    )
    for family, k in families:
        spec = _spec_from(family, n, k)
        links = len(edge_skeleton(spec))
        path_len = effective_path_length(generate(spec, p))
        for m_links in range(links + 1):
            est = run_scenario_B(spec, p, m_links, mode="exhaustive", seed=args.seed)
            result.append(
                "B", family, k, n, p, m_links, m_links / links, est.sample_count,
                None, path_len, est.mean, est.sample_min, est.sample_max,
                est.spread_std, est.std_error,
            )
        est = run_scenario_C(spec, samples, seed=args.seed, threads=threads)
        result.append(
            "C", family, k, n, None, None, None, None, samples, path_len,
            est.mean, est.sample_min, est.sample_max, est.spread_std,
            est.std_error,
        )
    return result


def _sweep_fig3c(args) -> SweepResult:
    n = args.n or 10
    samples = args.samples or default_sample_count(n)
    threads = resolve_threads(args.threads)
    families = _families_from_args(args, "chain,flower:3,star")
    result = SweepResult(
        ("family", "k", "n", "samples", "f_mean", "std_error", "f_min", "f_max", "f_std")
    )
    for family, k in families:
        spec = _spec_from(family, n, k)
        est = run_scenario_C(spec, samples, seed=args.seed, threads=threads)
        result.append(
            family, k, n, samples, est.mean, est.std_error,
            est.sample_min, est.sample_max, est.spread_std,
        )
    return result


def _apply_preset(args) -> str:
    """Fill preset defaults into unset args; returns the effective kind."""
    preset = args.preset
    if preset == "fig2":
        return "fig2"
    if preset == "fig3a":
        args.families = args.families or "chain,flower:3,star"
        args.n = args.n or 10
        return "p"
    if preset == "fig3b":
        args.families = args.families or "chain,flower:3,star"
        args.n = args.n or 10
        if args.p is None:
            args.p = 0.5
        return "m"
    if preset == "fig3c":
        return "fig3c"
    if preset == "fig3def":
        args.families = args.families or "star,flower:48,chain"
        args.n = args.n or 100
        return "pm-grid"
    if preset == "fig4":
        return "N"
    if preset == "fig5":
        args.n = args.n or 8
        return "d"
    raise TopologySpecError(f"unknown preset {preset!r}")


def cmd_sweep(args, argv) -> int:
    kind = args.kind
    if args.preset:
        kind = _apply_preset(args)
    if kind is None:
        raise TopologySpecError("provide --kind or --preset")
    builders = {
        "p": _sweep_p,
        "m": _sweep_m,
        "N": _sweep_N,
        "d": _sweep_d,
        "pm-grid": _sweep_pm_grid,
        "fig2": _sweep_fig2,
        "fig3c": _sweep_fig3c,
    }
    result = builders[kind](args)
    meta = _sweep_metadata(args, argv)
    meta.update(result.metadata)
    result.metadata = meta
    out = args.out or f"{args.preset or kind}.csv"
    _write_csv(result, out)
    print(f"wrote {len(result.rows)} rows to {out}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnetfid",
        description="Average maximum teleportation fidelity of repeater networks",
    )
    parser.add_argument("--version", action="version", version=f"qnetfid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a topology as an edge-list file")
    gen.add_argument("--family", required=True, choices=CANONICAL_FAMILIES)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, default=None, help="flower parameter")
    gen.add_argument("--p", type=float, default=None, help="uniform link weight")
    gen.add_argument("--weights", default=None, help="comma-separated weights")
    gen.add_argument("--me-links", default=None, help="comma-separated ME link indices")
    gen.add_argument("-o", "--out", default=None, help="output path (default stdout)")
    gen.set_defaults(func=lambda a, argv: cmd_generate(a))

    comp = sub.add_parser("compute", help="evaluate one network or scenario")
    comp.add_argument("--graph", default=None, help="edge-list file to evaluate")
    comp.add_argument("--family", default=None, choices=CANONICAL_FAMILIES)
    comp.add_argument("--n", type=int, default=None)
    comp.add_argument("--k", type=int, default=None)
    comp.add_argument("--scenario", choices=("A", "B", "C"), default=None)
    comp.add_argument("--p", type=float, default=None)
    comp.add_argument("--me-count", type=int, default=None, help="scenario B ME link count")
    comp.add_argument(
        "--placement-mode", choices=("exhaustive", "sample"), default="exhaustive"
    )
    comp.add_argument("--placements", type=int, default=1000, help="sampled placements")
    comp.add_argument(
        "--samples", type=int, default=None,
        help="scenario C samples (default 10^5 up to 10 nodes, 10^3 above)",
    )
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--threads", type=int, default=None)
    comp.add_argument("--pairs", action="store_true", help="include the per-pair table")
    comp.add_argument("--eff-length", action="store_true")
    comp.add_argument("--format", choices=("text", "json", "csv"), default="text")
    comp.set_defaults(func=lambda a, argv: cmd_compute(a))

    sweep = sub.add_parser("sweep", help="parameter sweep to CSV")
    sweep.add_argument("--kind", choices=SWEEP_KINDS, default=None)
    sweep.add_argument("--preset", choices=PRESETS, default=None)
    sweep.add_argument("--family", default=None)
    sweep.add_argument("--families", default=None, help="comma list, e.g. chain,flower:3,star")
    sweep.add_argument("--n", type=int, default=None)
    sweep.add_argument("--k", type=int, default=None)
    sweep.add_argument("--p", type=float, default=None)
    sweep.add_argument("--m", type=float, default=None, help="ME link fraction")
    sweep.add_argument("--n-list", default=None, help="comma list of node counts")
    sweep.add_argument("--points", type=int, default=None, help="grid points per axis")
    sweep.add_argument("--samples", type=int, default=None)
    sweep.add_argument("--mode", choices=("auto", "analytic", "exhaustive", "sample"), default="auto")
    sweep.add_argument("--placement-cap", type=int, default=10**6)
    sweep.add_argument("--alpha", type=float, default=0.46, help="fibre attenuation dB/km")
    sweep.add_argument("--p-det", type=float, default=1.0)
    sweep.add_argument("--d-min", type=float, default=30.0)
    sweep.add_argument("--d-max", type=float, default=150.0)
    sweep.add_argument("--d-step", type=float, default=10.0)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--threads", type=int, default=None)
    sweep.add_argument("--no-timestamp", action="store_true")
    sweep.add_argument("-o", "--out", default=None, help="output CSV path")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, list(argv))
    except (TopologySpecError, WeightError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRAPH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
