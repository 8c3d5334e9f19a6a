"""Command-line front end.

Commands: check-axioms, classify, kgroup, equiv, theta.  All randomness
derives from (--seed, trial index); JSON reports are canonical
(sorted keys, compact) so identical configurations produce
byte-identical output.  Exit codes: 0 all pass, 1 property failure,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import equivalence as eqv
from . import kgroups, model, serialize, suites
from .errors import (AlgebraMismatch, AmokError, DomainError, LevelMismatch,
                     NoConvergence, NotCancellative, NotPartialUnitary,
                     NotProjection, NotUnital, PreconditionFailure,
                     PredicateFailure, ShapeMismatch, SpecParseError,
                     Unsupported, ZeroOperand)

EXIT_PASS = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_INPUT_ERRORS = (SpecParseError, ShapeMismatch, AlgebraMismatch,
                 LevelMismatch, NotProjection, NotPartialUnitary,
                 PreconditionFailure, Unsupported, ZeroOperand, NotUnital)
_NUMERICAL_ERRORS = (NoConvergence, DomainError, PredicateFailure,
                     NotCancellative)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--tol-pred", type=float, default=model.TOL_PRED)
    common.add_argument("--tol-path", type=float, default=eqv.TOL_PATH)
    common.add_argument("--tol-bisect", type=float, default=model.TOL_BISECT)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", default=None,
                        help="write the report to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="amok",
        description="K-theory computations over finite block algebras "
                    "and circle-grid matrix algebras",
        parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-axioms", parents=[common],
                       help="run the property suites")
    p.add_argument("algebra", help="path to an algebra JSON spec")

    p = sub.add_parser("classify", parents=[common],
                       help="evaluate the element predicates")
    p.add_argument("element", help="path to an element JSON file")

    p = sub.add_parser("kgroup", parents=[common], help="compute a K-group")
    p.add_argument("algebra", help="path to an algebra JSON spec")
    p.add_argument("--which", choices=("k0", "k1", "k"), required=True)

    p = sub.add_parser("equiv", parents=[common],
                       help="decide an equivalence relation")
    p.add_argument("u", help="path to the first element")
    p.add_argument("v", help="path to the second element")
    p.add_argument("--relation", required=True,
                   choices=("mvn", "h", "sim1", "approx1", "simK", "approxK"))

    p = sub.add_parser("theta", parents=[common],
                       help="split a K class into (K0, K1) parts")
    p.add_argument("x", help="path to a JSON object {\"u\": element, "
                             "\"v\": element} of partial unitaries")
    return parser


def _config(args) -> suites.RunConfig:
    return suites.RunConfig(seed=args.seed, trials=args.trials,
                            tol_pred=args.tol_pred, tol_path=args.tol_path,
                            tol_bisect=args.tol_bisect)


def _emit(args, report: dict, text_lines, elapsed: float) -> None:
    if args.format == "json":
        out = serialize.dumps_canonical(report) + "\n"
    else:
        out = "\n".join(text_lines + [f"elapsed: {elapsed:.2f}s"]) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _config_json(cfg: suites.RunConfig) -> dict:
    return {"seed": cfg.seed, "trials": cfg.trials, "tol_pred": cfg.tol_pred,
            "tol_path": cfg.tol_path, "tol_bisect": cfg.tol_bisect}


def cmd_check_axioms(args) -> int:
    cfg = _config(args)
    algebra = serialize.load_algebra(args.algebra)
    t0 = time.time()
    results = suites.check_axioms(algebra, cfg)
    elapsed = time.time() - t0
    report = {"command": "check-axioms",
              "algebra": serialize.algebra_to_json(algebra),
              "config": _config_json(cfg),
              "properties": [r.to_json() for r in results]}
    lines = [f"check-axioms over {serialize.dumps_canonical(report['algebra'])}"]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"  [{status}] {r.name}: trials={r.trials} "
                     f"worst={r.worst_residual:.3e} failures={len(r.failures)}")
        for f in r.failures[:3]:
            lines.append(f"      {f}")
    _emit(args, report, lines, elapsed)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_PROPERTY


def cmd_classify(args) -> int:
    cfg = _config(args)
    v = serialize.load_element(args.element)
    t0 = time.time()
    flags = model.classify(v, cfg.tol_pred)
    a = model.abs_value(v)
    astar = model.abs_value(v.adjoint())
    norm = model.order_unit_norm(v, cfg.tol_bisect)
    elapsed = time.time() - t0
    report = {"command": "classify",
              "config": _config_json(cfg),
              "flags": {"is_selfadjoint": flags.is_selfadjoint,
                        "is_positive": flags.is_positive,
                        "is_order_projection": flags.is_order_projection,
                        "is_partial_isometry": flags.is_partial_isometry,
                        "is_unitary": flags.is_unitary,
                        "is_partial_unitary": flags.is_partial_unitary},
              "norm": norm,
              "abs": serialize.element_to_json(a),
              "abs_adjoint": serialize.element_to_json(astar)}
    lines = [f"classify {args.element}"]
    for k, val in report["flags"].items():
        lines.append(f"  {k}: {val}")
    lines.append(f"  norm: {norm:.12g}")
    _emit(args, report, lines, elapsed)
    return EXIT_PASS


def cmd_kgroup(args) -> int:
    cfg = _config(args)
    algebra = serialize.load_algebra(args.algebra)
    tag = {"k0": kgroups.K0, "k1": kgroups.K1, "k": kgroups.K}[args.which]
    t0 = time.time()
    view = kgroups.group_view(algebra, tag)
    elapsed = time.time() - t0
    report = {"command": "kgroup",
              "algebra": serialize.algebra_to_json(algebra),
              "config": _config_json(cfg),
              "view": serialize.group_view_to_json(view)}
    lines = [f"{tag} of {serialize.dumps_canonical(report['algebra'])}",
             f"  rank: {view.rank}",
             f"  order unit: {list(view.order_unit.normal_form)}",
             f"  cone: {view.cone}"]
    for name, val in view.flags:
        lines.append(f"  {name}: {val}")
    _emit(args, report, lines, elapsed)
    return EXIT_PASS


def cmd_equiv(args) -> int:
    cfg = _config(args)
    u = serialize.load_element(args.u)
    v = serialize.load_element(args.v)
    t0 = time.time()
    witness = None
    if args.relation == "mvn":
        ok, cert = eqv.mvn_equivalent(u, v, cfg.tol_pred)
        if cert is not None:
            if not cert.validate(cfg.tol_pred):
                raise PredicateFailure("certificate failed re-validation")
            witness = serialize.certificate_to_json(cert)
    elif args.relation == "h":
        decide = (eqv.homotopic_unitaries if model.is_unitary(u, cfg.tol_pred)
                  else eqv.homotopic_partial_unitaries)
        ok, path = decide(u, v, cfg.tol_pred)
        if path is not None:
            path.validate_strict(cfg.tol_path)
            witness = serialize.path_to_json(path)
    elif args.relation in ("sim1", "approx1"):
        fn = (eqv.sim1_equivalent if args.relation == "sim1"
              else eqv.approx1_equivalent)
        ok, path = fn(u, v, cfg.tol_pred)
        if path is not None:
            path.validate_strict(cfg.tol_path)
            witness = serialize.path_to_json(path)
    else:
        fn = (eqv.simK_equivalent if args.relation == "simK"
              else eqv.approxK_equivalent)
        ok, path = fn(u, v, cfg.tol_pred)
        if path is not None:
            path.validate_strict(cfg.tol_path)
            witness = serialize.path_to_json(path)
    elapsed = time.time() - t0
    report = {"command": "equiv", "relation": args.relation,
              "config": _config_json(cfg), "equivalent": bool(ok),
              "witness": witness}
    if u.algebra.variant == "circle":
        try:
            report["windings"] = [eqv.winding(u), eqv.winding(v)]
        except AmokError:
            pass
    lines = [f"equiv --relation {args.relation}: {bool(ok)}"]
    if "windings" in report:
        lines.append(f"  windings: {report['windings']}")
    if witness is not None:
        lines.append(f"  witness kind: {witness['kind']} (validated)")
    _emit(args, report, lines, elapsed)
    return EXIT_PASS


def cmd_theta(args) -> int:
    cfg = _config(args)
    try:
        with open(args.x) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise SpecParseError(f"cannot read {args.x}: {exc}")
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{args.x}: invalid JSON at line {exc.lineno}")
    serialize._require_fields(obj, ("u", "v"), ("u", "v"), "theta input")
    u = serialize.parse_element(obj["u"])
    v = serialize.parse_element(obj["v"])
    if u.algebra != v.algebra:
        raise AlgebraMismatch("pair members live over different algebras")
    t0 = time.time()
    x = kgroups.k_pair_class(u, v, cfg.tol_pred)
    k0_part, k1_part = kgroups.theta_map(u.algebra, x)
    au, mu_u = kgroups.theta_witnesses(u, cfg.tol_pred)
    elapsed = time.time() - t0
    report = {"command": "theta", "config": _config_json(cfg),
              "k_class": list(x.normal_form),
              "k0_part": list(k0_part.normal_form),
              "k1_part": list(k1_part.normal_form),
              "eta_witness": serialize.element_to_json(au),
              "mu_witness": serialize.element_to_json(mu_u)}
    lines = [f"theta of K class {list(x.normal_form)}",
             f"  K0 part: {list(k0_part.normal_form)}",
             f"  K1 part: {list(k1_part.normal_form)} (trivial group)",
             "  mu witness validated unitary"]
    _emit(args, report, lines, elapsed)
    return EXIT_PASS


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"check-axioms": cmd_check_axioms, "classify": cmd_classify,
                "kgroup": cmd_kgroup, "equiv": cmd_equiv, "theta": cmd_theta}
    try:
        return handlers[args.command](args)
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"error ({type(exc).__name__}): {exc}\n")
        return EXIT_INPUT
    except _NUMERICAL_ERRORS as exc:
        sys.stderr.write(f"numerical failure ({type(exc).__name__}): {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
