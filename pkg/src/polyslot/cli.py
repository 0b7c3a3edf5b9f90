"""Command-line front end: verification, decomposition, demos, network evaluation.

Exit codes: 0 success/pass, 1 verification or check failure, 2 usage error.
Reports are deterministic for fixed (command, seed, inputs).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .categories import CategoryTag, unitarity_defect
from .comb import comb_to_json, slot_to_comb
from .errors import PolyslotError
from .lat import interchange_failure_demo
from .pathing import PathConstraint, check_no_path_unitary, extract_witness
from .polycat import _backend_from_json, check_associativity, network_from_json
from .supermap import (
    InternalSupermap,
    loop_rejection_demo,
    pair_supermap,
    seqcomp_supermap,
    verify,
)
from .switch import build_switch, standard_control, switch_closed_form
from .tensor import (
    Morphism,
    Tolerance,
    max_entry_diff,
    morphism_from_json,
    morphism_to_json,
)

__all__ = ["main", "run"]


def _load_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("POLYSLOT_SEED")
    return int(env) if env else 0


def _emit(report: dict, args) -> None:
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, default=_jsonable))
    else:
        _pretty(report)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, Morphism):
        return morphism_to_json(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def _pretty(report: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for k, v in report.items():
        if isinstance(v, dict):
            print(f"{pad}{k}:")
            _pretty(v, indent + 1)
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            print(f"{pad}{k}: [{len(v)} entries]")
        else:
            print(f"{pad}{k}: {v}")


def _plot(args, figures) -> list[str]:
    """figures: list of ("name", kind, payload) to render under --plot-dir."""
    if not args.plot_dir:
        return []
    from . import plots

    out = Path(args.plot_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, kind, payload in figures:
        if kind == "morphism":
            written.append(str(plots.save_morphism_heatmap(payload, out / f"{name}.png",
                                                           title=name)))
            written.append(str(plots.save_morphism_csv(payload, out / f"{name}.csv")))
        elif kind == "bars":
            values, threshold = payload
            written.append(str(plots.save_defect_bars(values, out / f"{name}.png",
                                                      title=name, threshold=threshold)))
    return sorted(written)


def _unwrap(obj: dict, key: str) -> dict:
    """Fixture files wrap the payload under a named key; accept both shapes."""
    return obj.get(key, obj)


def _cmd_verify(args) -> int:
    backend = _backend_from_json(_unwrap(_load_json(args.file), "backend"))
    cat = CategoryTag.FU if args.cat == "fu" else CategoryTag.FQC
    rep = verify(backend, cat=cat, n_trials=args.trials, seed=_seed(args),
                 tol=Tolerance(args.tol))
    report = {"command": "verify", "seed": _seed(args), **rep.to_json()}
    report["figures"] = _plot(args, [
        ("verify_defects", "bars",
         ({"unitarity": rep.max_unitarity_defect, "cptp": rep.max_cptp_defect},
          args.tol)),
    ])
    _emit(report, args)
    return 0 if rep.passed else 1


def _cmd_decompose(args) -> int:
    backend = _backend_from_json(_unwrap(_load_json(args.file), "backend"))
    if not isinstance(backend, InternalSupermap):
        print("decompose expects an internal supermap description", file=sys.stderr)
        return 2
    comb = slot_to_comb(backend, Tolerance(args.tol), seed=_seed(args))
    report = {
        "command": "decompose",
        "seed": _seed(args),
        "memory": list(comb.memory.factors),
        "comb": comb_to_json(comb),
    }
    report["figures"] = _plot(args, [
        ("pre", "morphism", comb.pre),
        ("post", "morphism", comb.post),
    ])
    _emit(report, args)
    return 0


def _cmd_pathing(args) -> int:
    phi = morphism_from_json(_unwrap(_load_json(args.file), "morphism"))
    c = PathConstraint(tuple(args.from_inputs), tuple(args.to_outputs))
    tol = Tolerance(args.tol)
    ok = check_no_path_unitary(phi, c, tol)
    report = {"command": f"pathing {args.action}", "constraint": {
        "from_inputs": list(c.from_inputs), "to_outputs": list(c.to_outputs)},
        "no_path": ok}
    figures = [("morphism", "morphism", phi)]
    if args.action == "extract":
        if not ok:
            report["witness"] = None
            _emit(report, args)
            return 1
        w = extract_witness(phi, c, tol)
        report["witness"] = {
            "first": morphism_to_json(w.first),
            "second": morphism_to_json(w.second),
            "memory": list(w.memory.factors),
        }
        figures += [("first", "morphism", w.first), ("second", "morphism", w.second)]
    report["figures"] = _plot(args, figures)
    _emit(report, args)
    return 0 if ok else 1


def _cmd_demo(args) -> int:
    tol = Tolerance(args.tol)
    if args.which == "interchange":
        lhs, rhs = interchange_failure_demo(args.dim)
        diff = max_entry_diff(lhs, rhs)
        report = {
            "command": "demo interchange",
            "dim": args.dim,
            "loop_then_v": morphism_to_json(lhs),
            "v_then_loop": morphism_to_json(rhs),
            "max_entry_difference": diff,
            "interchange_holds": diff <= tol.abs_tol,
        }
        figures = [("loop_then_v", "morphism", lhs), ("v_then_loop", "morphism", rhs)]
    elif args.which == "loop":
        demo = loop_rejection_demo(seqcomp_supermap([args.dim]),
                                   pair_supermap([args.dim]))
        report = {
            "command": "demo loop",
            "dim": args.dim,
            "rejection": type(demo.rejection).__name__ if demo.rejection else None,
            "scalar": demo.scalar,
            "raw": morphism_to_json(demo.raw),
            "note": "raw double contraction is 1/d times a unitary; "
                    "the one-wire rule rejects the second composition",
        }
        figures = [("raw_contraction", "morphism", demo.raw)]
    else:  # switch
        from .categories import haar_unitary

        rng = np.random.default_rng(_seed(args))
        ctrl = standard_control(2)
        sw = build_switch(ctrl, [args.dim])
        u = haar_unitary([args.dim], rng)
        v = haar_unitary([args.dim], rng)
        out = sw.apply([u, v])
        cf = switch_closed_form(ctrl, [u, v])
        rep = verify(sw.backend, n_trials=args.trials, seed=_seed(args), tol=tol)
        report = {
            "command": "demo switch",
            "dim": args.dim,
            "seed": _seed(args),
            "closed_form_residual": max_entry_diff(out, cf),
            "unitarity_defect": unitarity_defect(out),
            "blocks": {
                "pi0_branch": morphism_to_json(
                    Morphism(u.dom, u.cod, (v.mat @ u.mat))),
                "pi1_branch": morphism_to_json(
                    Morphism(u.dom, u.cod, (u.mat @ v.mat))),
            },
            "verify": rep.to_json(),
        }
        figures = [("switch_output", "morphism", out)]
    report["figures"] = _plot(args, figures)
    _emit(report, args)
    return 0


def _cmd_polycat(args) -> int:
    if args.action == "check" and args.file is None:
        rep = check_associativity(seed=_seed(args), trials=args.trials,
                                  tol=Tolerance(args.tol))
        report = {"command": "polycat check", "seed": _seed(args), **rep}
        report["figures"] = _plot(args, [
            ("associativity", "bars", ({"max_deviation": rep["max_deviation"]},
                                       args.tol))])
        _emit(report, args)
        return 0 if rep["verdict"] == "pass" else 1
    obj = _unwrap(_load_json(args.file), "network")
    live, result = network_from_json(obj)
    report = {
        "command": f"polycat {args.action}",
        "terms": {tid: {"inputs": len(t.inputs), "outputs": len(t.outputs)}
                  for tid, t in live.items()},
    }
    figures = []
    if result is not None:
        report["result"] = morphism_to_json(result)
        figures.append(("result", "morphism", result))
    if args.action == "check":
        reps = {tid: verify(t, n_trials=args.trials, seed=_seed(args),
                            tol=Tolerance(args.tol)).to_json()
                for tid, t in live.items()}
        report["verify"] = reps
        ok = all(r["verdict"] == "pass" for r in reps.values())
        report["verdict"] = "pass" if ok else "fail"
    report["figures"] = _plot(args, figures)
    _emit(report, args)
    return 0 if report.get("verdict", "pass") == "pass" else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyslot",
                                description="holes-in-circuits toolkit")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--format", choices=["json", "pretty"], default="json")
    common.add_argument("--plot-dir", default=None,
                        help="render matplotlib figures and CSV tables here")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common],
                       help="supermap category-preservation check")
    v.add_argument("--cat", choices=["fu", "fqc"], default="fu")
    v.add_argument("file", help="backend JSON ('-' for stdin)")
    v.set_defaults(fn=_cmd_verify)

    d = sub.add_parser("decompose", parents=[common],
                       help="extract the comb realizing a single-slot supermap")
    d.add_argument("file")
    d.set_defaults(fn=_cmd_decompose)

    pa = sub.add_parser("pathing", parents=[common],
                        help="no-pathing decision and witness extraction")
    pa.add_argument("action", choices=["check", "extract"])
    pa.add_argument("file", help="morphism JSON ('-' for stdin)")
    pa.add_argument("--from", dest="from_inputs", type=int, nargs="+", required=True,
                    help="forbidden source input factor indices")
    pa.add_argument("--to", dest="to_outputs", type=int, nargs="+", required=True,
                    help="forbidden target output factor indices")
    pa.set_defaults(fn=_cmd_pathing)

    de = sub.add_parser("demo", parents=[common], help="built-in demonstrations")
    de.add_argument("which", choices=["interchange", "loop", "switch"])
    de.add_argument("--dim", type=int, default=2)
    de.set_defaults(fn=_cmd_demo)

    pc = sub.add_parser("polycat", parents=[common],
                        help="network evaluation and law checking")
    pc.add_argument("action", choices=["eval", "check"])
    pc.add_argument("file", nargs="?", default=None)
    pc.set_defaults(fn=_cmd_polycat)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if getattr(args, "trials", 1) < 1:
        print("--trials must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (PolyslotError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
