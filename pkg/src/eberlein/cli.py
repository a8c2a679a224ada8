"""Command line front end.

Exit codes: 0 pass, 1 fail, 2 inconclusive or numerical non-convergence,
3 input that does not match the schemas.  Every artifact carries the library
version, the group and the options used, so a run can be replayed from its
outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import corpus as corpus_mod
from . import decomp
from . import funcspace as fs
from . import io
from . import probes
from . import semimeasure as smod
from .group import GroupSpec, VanHoveSequence, dual
from .measure import (
    ConcreteMeasure,
    TransformError,
    fourier_transform_measure,
    inverse_fourier_transform_measure,
)
from .report import ProbeReport

EXIT_SCHEMA = 3
EXIT_NUMERIC = 2


class SchemaError(Exception):
    pass


# -- helpers --------------------------------------------------------------------------


def _meta(args, group: GroupSpec | None, **extra) -> dict:
    opts = {k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)}
    opts = json.loads(json.dumps(opts, default=str))
    meta = {"version": __version__, "verb": args.verb, "options": opts, "seed": args.seed}
    if group is not None:
        meta["group"] = group.to_json()
    meta.update(extra)
    return meta


def _load(path, kinds) -> tuple[str, dict]:
    try:
        doc = io.read_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: cannot read JSON ({exc})") from None
    kind = io.detect_kind(doc)
    if kind not in kinds:
        raise SchemaError(f"{path}: expected {' or '.join(kinds)}, got {kind}")
    try:
        io.validate(doc, kind)
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"{path}: schema violation at {pointer}: {exc.message}") from None
    return kind, doc


def _load_semimeasure(path) -> smod.SemiMeasure:
    """A semi-measure file, or a measure file read as the dual measure."""
    kind, doc = _load(path, ("semimeasure", "measure"))
    if kind == "semimeasure":
        return io.semimeasure_from_json(doc)
    nu = io.measure_from_json(doc)
    if not nu.group.is_dual:
        nu = nu.replace(group=dataclasses.replace(nu.group, is_dual=True))
    return smod.from_dual(nu)


def _load_k2(path, group: GroupSpec | None = None) -> fs.K2Function:
    _, doc = _load(path, ("k2_function",))
    f = io.k2_from_json(doc)
    if group is not None and f.group != group:
        raise SchemaError(f"{path}: function group does not match the semi-measure group")
    return f


def _default_fn(G: GroupSpec) -> fs.K2Function:
    if G.is_finite:
        d = fs.delta(G, [0] * G.ndim)
        return fs.k2_from_pair(d, d)
    g = fs.smooth_bump(G, min(0.5, G.L / 8))
    return fs.k2_from_pair(g, fs.tilde_compact(g))


def _write_report(args, report: ProbeReport, group: GroupSpec) -> int:
    doc = {"meta": _meta(args, group), "report": report.to_json()}
    if args.out:
        io.write_json(args.out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
    if getattr(args, "trace_csv", None):
        io.write_csv(args.trace_csv, ["n", "value"], report.trace)
    return report.exit_code


def _with_meta(doc: dict, meta: dict) -> dict:
    return {**doc, "meta": meta}


def _emit(args, doc):
    if args.out:
        io.write_json(args.out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")


# -- verbs -------------------------------------------------------------------------------


def cmd_transform(args) -> int:
    kind, doc = _load(args.input, ("measure", "semimeasure"))
    if kind == "semimeasure":
        sm = io.semimeasure_from_json(doc)
        out = io.measure_to_json(sm.dual_measure)
        meta = _meta(args, sm.group, direction="semimeasure -> dual measure")
    else:
        mu = io.measure_from_json(doc)
        if args.inverse:
            nu = inverse_fourier_transform_measure(mu)
        else:
            nu = fourier_transform_measure(mu)
        if args.prune is not None:
            nu = nu.prune(args.prune)
        out = io.measure_to_json(nu)
        meta = _meta(args, mu.group, direction="inverse" if args.inverse else "forward")
    _emit(args, _with_meta(out, meta))
    return 0


def cmd_decompose(args) -> int:
    sm = _load_semimeasure(args.input)
    parts = decomp.generalized_eberlein(sm)
    wanted = [p.strip() for p in args.parts.split(",") if p.strip()]
    table = {"pp": parts.strong, "ac": parts.null_ac, "sc": parts.null_sc, "null": parts.null}
    unknown = set(wanted) - set(table)
    if unknown:
        raise SchemaError(f"unknown part(s): {sorted(unknown)}")
    prefix = Path(args.out_prefix)
    meta = _meta(args, sm.group)
    written = {}
    for name in wanted:
        path = prefix.with_name(f"{prefix.name}.{name}.json")
        io.write_json(path, _with_meta(io.semimeasure_to_json(table[name]), {**meta, "part": name}))
        written[name] = str(path)
    json.dump({"parts": written}, sys.stdout)
    sys.stdout.write("\n")
    return 0


def cmd_fb(args) -> int:
    sm = _load_semimeasure(args.input)
    series = decomp.fb_series(sm)
    doc = {**series.to_json(), "meta": _meta(args, sm.group)}
    code = 0
    if args.chi is not None:
        G = sm.group
        f = _load_k2(args.fn, G) if args.fn else _default_fn(G)
        chi = [float(c) for c in args.chi.split(",")]
        chi = chi if G.is_finite else chi[0]
        r_max = args.r_max if args.r_max is not None else (G.L * 0.9 if not G.is_finite else None)
        seq = VanHoveSequence.geometric(G, args.n_max, r_max)
        check = decomp.fb_via_averaging(sm, f, chi, seq, coefficient=args.coefficient)
        doc["averaging"] = {"chi": chi, "averaged": [check.averaged.real, check.averaged.imag],
                            "target": [check.target.real, check.target.imag], "gap": check.gap,
                            "converged": check.trace.converged}
        if args.trace_csv:
            io.write_csv(args.trace_csv, ["n", "measure", "re", "im", "scaled_error"],
                         [(*row, e) for row, e in zip(check.trace.to_rows(), check.scaled_errors)])
        if not check.trace.converged:
            code = EXIT_NUMERIC
    _emit(args, doc)
    return code


def cmd_convolve(args) -> int:
    sm = _load_semimeasure(args.input)
    G = sm.group
    f = _load_k2(args.fn, G) if args.fn else _default_fn(G)
    vals = smod.convolve(sm, f)
    if G.is_finite:
        pts = G.points()
        rows = [(*map(int, p), v.real, v.imag) for p, v in zip(pts, vals.reshape(-1))]
        header = [f"t{j}" for j in range(G.ndim)] + ["re", "im"]
    else:
        x = G.grid()
        lo = -G.L if args.t_min is None else args.t_min
        hi = G.L if args.t_max is None else args.t_max
        m = (x >= lo) & (x <= hi)
        rows = [(t, v.real, v.imag) for t, v in zip(x[m], vals[m])]
        header = ["t", "re", "im"]
    io.write_csv(args.out, header, rows)
    io.write_json(Path(args.out).with_suffix(".meta.json"), _meta(args, G))
    return 0


def cmd_bochner(args) -> int:
    sm = _load_semimeasure(args.input)
    rep = smod.is_positive_definite(sm, size=args.size, seed=args.seed)
    return _write_report(args, rep, sm.group)


def cmd_probe(args) -> int:
    sm = _load_semimeasure(args.input)
    G = sm.group
    kind = args.kind
    if kind == "measure":
        U = args.U
        if U is None and not G.is_finite:
            U = min(0.5, G.L / 4)
        n_max = args.n_max
        if not G.is_finite:
            n_max = min(n_max, fs.max_identity_level(G, U))
        rep = probes.measure_probe(sm.dual_measure, U=U, n_max=n_max)
    elif kind == "translation":
        U = args.U if args.U is not None else probes.default_radius(G)
        battery = probes.UnitBallBattery.random(G, U, size=args.size, seed=args.seed)
        rep = probes.translation_bounded_probe(sm, battery)
    elif kind == "intertwining":
        U = args.U if args.U is not None else probes.default_radius(G)
        fns = probes.UnitBallBattery.random(G, U, size=2 * max(args.size // 8, 1), seed=args.seed).functions
        pairs = list(zip(fns[0::2], fns[1::2]))
        rep = probes.intertwining_check(sm, pairs, tol=args.tol)
    else:
        nu = sm.dual_measure
        if nu.density is None:
            raise SchemaError("density probe needs a dual measure with an ac_density")
        battery = smod.random_battery(G, 8, seed=args.seed, U=args.U)
        rep = probes.density_class_check(nu, args.p, battery=battery, U=args.U)
    return _write_report(args, rep, G)


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise SchemaError(f"corpus parameter {item!r} is not key=value")
        k, v = item.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def cmd_corpus(args) -> int:
    if args.action == "list":
        for name, e in corpus_mod.CORPUS.items():
            print(f"{name}\t{e.kind}\t{json.dumps(e.params, default=float)}")
        return 0
    params = _parse_params(args.param)
    try:
        obj = corpus_mod.build(args.name, **params)
    except KeyError as exc:
        raise SchemaError(str(exc.args[0])) from None
    if isinstance(obj, ConcreteMeasure):
        doc = io.measure_to_json(obj)
        group = obj.group
    else:
        doc = io.semimeasure_to_json(obj)
        group = obj.group
    if args.dual:
        if isinstance(obj, ConcreteMeasure):
            raise SchemaError("--dual applies to semi-measure entries")
        doc = io.measure_to_json(obj.dual_measure)
    _emit(args, _with_meta(doc, _meta(args, group, entry=args.name, params=params)))
    return 0


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    seed_default = probes.default_seed()
    p = argparse.ArgumentParser(prog="eberlein", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=seed_default,
                        help="battery seed (default: $EBERLEIN_SEED or 0)")
        return sp

    sp = add("transform", cmd_transform, "Fourier transform of a measure, or the dual of a semi-measure")
    sp.add_argument("input")
    sp.add_argument("--out", "-o")
    sp.add_argument("--inverse", action="store_true", help="inverse transform (finite groups)")
    sp.add_argument("--prune", type=float, default=None, help="drop atoms with |weight| <= PRUNE")

    sp = add("decompose", cmd_decompose, "generalized Eberlein decomposition")
    sp.add_argument("input")
    sp.add_argument("--out-prefix", required=True)
    sp.add_argument("--parts", default="pp,ac,sc", help="comma list from pp, ac, sc, null")

    sp = add("fb", cmd_fb, "Fourier-Bohr series, with an optional averaging cross-check")
    sp.add_argument("input")
    sp.add_argument("--out", "-o")
    sp.add_argument("--chi", help="frequency for the averaging check (comma list on finite groups)")
    sp.add_argument("--fn", help="K2 function JSON used in the averaging check")
    sp.add_argument("--coefficient", type=float, default=None, help="known a_chi overriding the dual lookup")
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--r-max", type=float, default=None)
    sp.add_argument("--trace-csv")

    sp = add("convolve", cmd_convolve, "sample theta * f")
    sp.add_argument("input")
    sp.add_argument("--fn", help="K2 function JSON (default: a smooth bump autocorrelation)")
    sp.add_argument("--out", "-o", required=True, help="CSV path")
    sp.add_argument("--t-min", type=float)
    sp.add_argument("--t-max", type=float)

    sp = add("bochner", cmd_bochner, "positive definiteness report")
    sp.add_argument("input")
    sp.add_argument("--out", "-o")
    sp.add_argument("--size", type=int, default=64)

    sp = add("probe", cmd_probe, "measure / translation / intertwining / density probes")
    sp.add_argument("kind", choices=["measure", "translation", "intertwining", "density"])
    sp.add_argument("input")
    sp.add_argument("--out", "-o")
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--U", type=float, default=None)
    sp.add_argument("--size", type=int, default=32)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--trace-csv")

    sp = add("corpus", cmd_corpus, "list or build corpus entries")
    sp.add_argument("action", choices=["list", "build"])
    sp.add_argument("name", nargs="?")
    sp.add_argument("--out", "-o")
    sp.add_argument("--param", action="append", help="builder override key=value (JSON value)")
    sp.add_argument("--dual", action="store_true", help="emit the dual measure instead")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "corpus" and args.action == "build" and not args.name:
        parser.error("corpus build needs a name")
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (smod.ConvergenceError, fs.ResolutionError, fs.WindowError, TransformError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except smod.NotWeaklyAdmissible as exc:
        print(f"error: {exc}", file=sys.stderr)
        trace = exc.report.to_json()
        print(json.dumps({"trace": trace["trace"], "witnesses": trace["witnesses"]}), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
