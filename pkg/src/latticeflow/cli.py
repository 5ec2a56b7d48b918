"""Batch CLI: every primitive and experiment behind flags, data on stdout.

Diagnostics (the resolved configuration, per-record timings, warnings) go
to stderr; stdout or --out carries only data that is a pure function of
the flags, so reruns are byte-identical.  Exit codes: 0 success, 1 usage
error, 2 budget exceeded (output still written, non-stabilized records
flagged inline).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from statistics import mean, stdev

from . import __version__
from .backend import BACKEND
from .capacity import CapacityField, DistributionSpec, parse_distribution, validate_for_theorems
from .cutflow import BudgetExceeded, brute_force_min_cycle, mincut_infinity, truncated_maxflow
from .experiments import (
    RunConfig,
    estimate_polygon_table,
    mann_kendall_S,
    mann_kendall_p_increasing,
    run_convergence,
    run_disjoint,
    run_tail,
)
from .fpp import MuTable, estimate_mu
from .geometry import i_functional, parse_polygon
from .lattice import sites_in_scaled_polygon

_FRACTION_FLAGS = ("eps", "p")


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeflow",
        description="max flow / min cut to infinity on random lattices, batch experiments",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_, **flags):
        p = sub.add_parser(name, help=help_)
        for flag, (required, default, kind, help2) in flags.items():
            p.add_argument(
                f"--{flag}",
                required=required,
                default=default,
                type=kind,
                help=help2,
                dest=flag.replace("-", "_"),
            )
        p.add_argument("--out", default=None, help="write data here instead of stdout")
        p.add_argument("--format", default=None, choices=("csv", "json"), help="output format")
        p.add_argument("--scale", default=1 << 20, type=int, help="micro-units per capacity unit")
        p.add_argument("--seed", default=0, type=int, help="master seed")
        return p

    add(
        "mu",
        "estimate the time constant in one direction",
        dist=(True, None, str, "capacity law, e.g. exp:1"),
        dir=(True, None, str, "primitive direction x,y"),
        n=(False, 64, int, "segment multiplier"),
        reps=(False, 30, int, "replicates"),
    )
    add(
        "mincut",
        "min cut separating the scaled polygon from infinity",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "square:R, ngon:K:R or @file"),
        n=(False, 1, int, "polygon scale"),
        **{"nmax-factor": (False, 512, int, "box doubling budget factor")},
    )
    add(
        "maxflow",
        "one truncated max-flow solve at box radius(A)+8",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "source polygon"),
        n=(False, 1, int, "polygon scale"),
    )
    add(
        "oracle",
        "brute-force minimal surrounding dual cycle (small boxes only)",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "source polygon (used at scale 1)"),
        n=(False, 4, int, "oracle box radius (<= 8)"),
    )
    add(
        "ifun",
        "boundary functional of a polygon under an estimated table",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "polygon"),
        n=(False, 64, int, "mu-estimation segment multiplier"),
        reps=(False, 30, int, "mu-estimation replicates"),
    )
    add(
        "converge",
        "scaled min-cut convergence experiment",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "polygon"),
        ngrid=(True, None, str, "comma-separated scales, e.g. 8,16,32"),
        reps=(False, 10, int, "replicates per scale"),
        eps=(False, None, str, "deviation band for the JSON summary"),
        **{"nmax-factor": (False, 512, int, "box doubling budget factor")},
    )
    add(
        "tail",
        "deviation-tail frequencies",
        dist=(True, None, str, "capacity law"),
        polygon=(True, None, str, "polygon"),
        ngrid=(True, None, str, "comma-separated scales"),
        reps=(False, 10, int, "replicates per scale"),
        eps=(True, None, str, "deviation band, e.g. 0.2 or 1/5"),
        **{"nmax-factor": (False, 512, int, "box doubling budget factor")},
    )
    add(
        "disjoint",
        "edge-disjoint open path counts under Bernoulli percolation",
        polygon=(True, None, str, "polygon"),
        ngrid=(True, None, str, "comma-separated scales"),
        reps=(False, 10, int, "replicates per scale"),
        p=(True, None, str, "bond open probability"),
        **{"nmax-factor": (False, 512, int, "box doubling budget factor")},
    )
    return parser


def _resolved_config(args) -> dict:
    cfg = {}
    for key, val in sorted(vars(args).items()):
        if key in ("out",):
            continue
        cfg[key] = val if not isinstance(val, Fraction) else _frac_str(val)
    cfg["artifact_version"] = __version__
    return cfg


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stamp(chash: str) -> str:
    return f"# latticeflow {__version__} config_sha256={chash}"


def _json_doc(chash: str, payload: dict) -> str:
    doc = {"artifact": f"latticeflow {__version__}", "config_sha256": chash}
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _parse_pair(text: str):
    sx, sy = text.split(",")
    return (int(sx), int(sy))


def _parse_grid(text: str):
    return tuple(int(tok) for tok in text.split(","))


def _warn_law(spec: DistributionSpec) -> None:
    report = validate_for_theorems(spec)
    if not report.zero_mass_ok:
        print(
            f"warning: law {spec} has mass >= 1/2 at zero; limit theorems do not apply",
            file=sys.stderr,
        )


def _cmd_mu(args, chash):
    spec = parse_distribution(args.dist)
    _warn_law(spec)
    est = estimate_mu(
        spec, _parse_pair(args.dir), n=args.n, reps=args.reps, seed=args.seed, scale=args.scale
    )
    if (args.format or "csv") == "csv":
        table = MuTable({est.direction: est}, scale=args.scale)
        return _stamp(chash) + "\n" + table.to_csv(), 0
    payload = {
        "direction": list(est.direction),
        "n": est.n_used,
        "reps": est.replicates,
        "mean_micro": _frac_str(est.mean_micro),
        "mean_units": float(est.mean_micro) / args.scale,
        "stderr_micro": est.stderr_micro,
    }
    return _json_doc(chash, payload), 0


def _cmd_mincut(args, chash):
    spec = parse_distribution(args.dist)
    _warn_law(spec)
    source = sites_in_scaled_polygon(parse_polygon(args.polygon), args.n)
    field = CapacityField(spec, args.seed, args.scale)
    res = mincut_infinity(field, source, nmax_factor=args.nmax_factor)
    payload = res.to_json_dict()
    payload["value_units"] = res.value_micro / args.scale
    return _json_doc(chash, payload), 0 if res.stabilized else 2


def _cmd_maxflow(args, chash):
    spec = parse_distribution(args.dist)
    _warn_law(spec)
    source = sites_in_scaled_polygon(parse_polygon(args.polygon), args.n)
    field = CapacityField(spec, args.seed, args.scale)
    res = truncated_maxflow(field, source, source.radius + 8)
    payload = res.to_json_dict()
    payload["value_units"] = res.value_micro / args.scale
    return _json_doc(chash, payload), 0


def _cmd_oracle(args, chash):
    spec = parse_distribution(args.dist)
    source = sites_in_scaled_polygon(parse_polygon(args.polygon), 1)
    field = CapacityField(spec, args.seed, args.scale)
    value = brute_force_min_cycle(field, source, args.n)
    payload = {
        "value_micro": value,
        "value_units": value / args.scale,
        "box_radius": args.n,
        "source_size": len(source),
    }
    return _json_doc(chash, payload), 0


def _cmd_ifun(args, chash):
    spec = parse_distribution(args.dist)
    _warn_law(spec)
    polygon = parse_polygon(args.polygon)
    cfg = RunConfig(
        spec=spec,
        polygon=polygon,
        n_grid=(1,),
        reps=1,
        master_seed=args.seed,
        scale=args.scale,
        mu_n=args.n,
        mu_reps=args.reps,
    )
    table = estimate_polygon_table(cfg)
    ival = i_functional(polygon, table)
    payload = {
        "i_micro": _frac_str(ival.value_micro),
        "i_units": float(ival.value_micro) / args.scale,
        "directions": {
            f"{v[0]},{v[1]}": _frac_str(e.mean_micro) for v, e in sorted(table.entries.items())
        },
    }
    return _json_doc(chash, payload), 0


def _convergence_csv(records, chash) -> str:
    lines = [_stamp(chash), "n,replicate,mincut_micro,i_hat_micro,ratio,stabilized"]
    for rec in records:
        lines.append(
            f"{rec.n},{rec.replicate},{rec.mincut_micro},{_frac_str(rec.i_hat_micro)},"
            f"{float(rec.ratio)!r},{'true' if rec.stabilized else 'false'}"
        )
    return "\n".join(lines) + "\n"


def _per_n_summary(records, epsilon):
    by_n = {}
    for rec in records:
        by_n.setdefault(rec.n, []).append(rec)
    rows = []
    for n in sorted(by_n):
        ratios = [float(r.ratio) for r in by_n[n]]
        row = {
            "n": n,
            "reps": len(ratios),
            "mean": mean(ratios),
            "std": stdev(ratios) if len(ratios) > 1 else 0.0,
            "min": min(ratios),
            "max": max(ratios),
        }
        if epsilon is not None:
            row["deviation_frequency"] = sum(
                1 for r in by_n[n] if not (1 - epsilon < r.ratio < 1 + epsilon)
            ) / len(ratios)
        rows.append(row)
    return rows


def _cmd_converge(args, chash):
    cfg = RunConfig(
        spec=parse_distribution(args.dist),
        polygon=parse_polygon(args.polygon),
        n_grid=_parse_grid(args.ngrid),
        reps=args.reps,
        master_seed=args.seed,
        epsilon=Fraction(args.eps) if args.eps else None,
        scale=args.scale,
        nmax_factor=args.nmax_factor,
    )
    records = run_convergence(cfg)
    for rec in records:
        print(f"n={rec.n} rep={rec.replicate} took {rec.wall_time:.3f}s", file=sys.stderr)
    code = 0 if all(r.stabilized for r in records) else 2
    if (args.format or "csv") == "csv":
        return _convergence_csv(records, chash), code
    return _json_doc(chash, {"per_n": _per_n_summary(records, cfg.epsilon)}), code


def _cmd_tail(args, chash):
    cfg = RunConfig(
        spec=parse_distribution(args.dist),
        polygon=parse_polygon(args.polygon),
        n_grid=_parse_grid(args.ngrid),
        reps=args.reps,
        master_seed=args.seed,
        epsilon=Fraction(args.eps),
        scale=args.scale,
        nmax_factor=args.nmax_factor,
    )
    summaries, records = run_tail(cfg)
    code = 0 if all(r.stabilized for r in records) else 2
    freqs = [s.frequency for s in summaries]
    if (args.format or "json") == "json":
        payload = {
            "epsilon": _frac_str(cfg.epsilon),
            "rows": [
                {
                    "n": s.n,
                    "reps": s.reps,
                    "outside": s.outside,
                    "frequency": s.frequency,
                    "wilson_lo": s.wilson_lo,
                    "wilson_hi": s.wilson_hi,
                }
                for s in summaries
            ],
            "mk_S": mann_kendall_S(freqs),
            "mk_p_increasing": mann_kendall_p_increasing(freqs),
        }
        return _json_doc(chash, payload), code
    lines = [_stamp(chash), "n,reps,outside,frequency,wilson_lo,wilson_hi"]
    for s in summaries:
        lines.append(
            f"{s.n},{s.reps},{s.outside},{s.frequency!r},{s.wilson_lo!r},{s.wilson_hi!r}"
        )
    return "\n".join(lines) + "\n", code


def _cmd_disjoint(args, chash):
    p = Fraction(args.p)
    cfg = RunConfig(
        spec=DistributionSpec.bernoulli(p),
        polygon=parse_polygon(args.polygon),
        n_grid=_parse_grid(args.ngrid),
        reps=args.reps,
        master_seed=args.seed,
        p_open=p,
        scale=args.scale,
        nmax_factor=args.nmax_factor,
    )
    records = run_disjoint(cfg)
    for rec in records:
        print(f"n={rec.n} rep={rec.replicate} took {rec.wall_time:.3f}s", file=sys.stderr)
    code = 0 if all(r.stabilized for r in records) else 2
    if (args.format or "csv") == "csv":
        lines = [_stamp(chash), "n,replicate,count,i_hat,ratio,stabilized"]
        for rec in records:
            lines.append(
                f"{rec.n},{rec.replicate},{rec.count},{_frac_str(rec.i_hat)},"
                f"{float(rec.ratio)!r},{'true' if rec.stabilized else 'false'}"
            )
        return "\n".join(lines) + "\n", code
    rows = _per_n_summary(records, None)
    return _json_doc(chash, {"per_n": rows}), code


_HANDLERS = {
    "mu": _cmd_mu,
    "mincut": _cmd_mincut,
    "maxflow": _cmd_maxflow,
    "oracle": _cmd_oracle,
    "ifun": _cmd_ifun,
    "converge": _cmd_converge,
    "tail": _cmd_tail,
    "disjoint": _cmd_disjoint,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors; remap to 1
        return 0 if exc.code == 0 else 1
    cfg = _resolved_config(args)
    chash = _config_hash(cfg)
    print(f"resolved config: {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)
    print(f"backend: {BACKEND}", file=sys.stderr)
    try:
        text, code = _HANDLERS[args.subcommand](args, chash)
    except (ValueError, OSError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(text, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
