"""Command-line entry point: ``jumpcoh <command> [flags]``.

Exit status: 0 on success, 1 on domain errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .cohomology import complex_cohomology
from .deformation import (
    DeformationMC,
    ObstructionCertificate,
    extend_class,
    jump_report,
    mc_check,
    obstruction_step,
)
from .errors import InvalidInputError, JumpcohError
from .expr import parse_vector
from .jetcomplex import (
    extend_oracle,
    jump_accounting,
    parse_complex,
    random_complex,
    render_complex,
    second_class_detect,
    truncated_cohomology,
)
from .modelio import bundled_model_path, load_model, parse_class


class _UsageError(Exception):
    pass


def _emit(fmt: str, table_lines: list[str], records: list[tuple[str, object]]) -> str:
    if fmt == "records":
        return "\n".join(f"{k}={v}" for k, v in records)
    return "\n".join(table_lines)


def _load(args):
    model, deformations = load_model(args.model)
    return model, deformations


def _pick_deformation(args, deformations) -> DeformationMC:
    if not deformations:
        raise InvalidInputError("the model file has no deformation section")
    if args.deformation is None:
        return deformations[0]
    for d in deformations:
        if d.name == args.deformation:
            return d
    names = ", ".join(d.name for d in deformations)
    raise InvalidInputError(f"no deformation named {args.deformation!r}; available: {names}")


def _direction(text):
    return None if text is None else parse_vector(text)


def _vec(values) -> str:
    return ",".join(str(v) for v in values)


# model commands ----------------------------------------------------------

def cmd_check_model(args) -> str:
    model, deformations = _load(args)
    table = [
        f"model: {model.name}",
        f"dim: {model.dim}",
        f"brackets: {len(model.bracket_triples())}",
        "jacobi: ok",
        f"nilpotent: {'yes' if model.is_nilpotent() else 'no'}",
    ]
    records = [
        ("model", model.name),
        ("dim", model.dim),
        ("brackets", len(model.bracket_triples())),
        ("jacobi", "ok"),
        ("nilpotent", "yes" if model.is_nilpotent() else "no"),
    ]
    for i, j, k, c in model.bracket_triples():
        table.append(f"  [theta{i}, theta{j}] -> {c}*theta{k}")
        records.append((f"bracket.{i}.{j}.{k}", c))
    for d in deformations:
        table.append(f"deformation {d.name}: params {' '.join(d.params.names)}; terms {len(d.psi.items())}; maurer-cartan ok")
        records += [
            (f"deformation.{d.name}.params", " ".join(d.params.names)),
            (f"deformation.{d.name}.terms", len(d.psi.items())),
            (f"deformation.{d.name}.psi", d.psi.render("cli")),
        ]
    return _emit(args.format, table, records)


def cmd_cohomology(args) -> str:
    model, _ = _load(args)
    spaces = complex_cohomology(model)
    dims = [s.dimension for s in spaces]
    table = [f"model {model.name} (dim {model.dim})", "q:    " + " ".join(str(q) for q in range(len(spaces)))]
    table.append("h(T): " + " ".join(str(h) for h in dims))
    records = [("model", model.name), ("h", " ".join(str(h) for h in dims))]
    for s in spaces:
        reps = [r.render("cli") for r in s.representatives]
        table.append(f"H^{s.degree}: " + (", ".join(reps) if reps else "0"))
        records.append((f"h.{s.degree}", s.dimension))
        records += [(f"rep.{s.degree}.{k}", r) for k, r in enumerate(reps)]
    return _emit(args.format, table, records)


def cmd_mc_check(args) -> str:
    model, deformations = _load(args)
    d = _pick_deformation(args, deformations)
    order = args.order if args.order is not None else max(d.validity_order, 4)
    report = mc_check(model, d, order)
    records = [
        ("deformation", d.name),
        ("order", order),
        ("mc_defect", report.defect.render("cli")),
        ("dd_failures", len(report.dd_defects)),
        ("status", "pass" if report.passed else "fail"),
    ]
    table = [f"deformation {d.name} at order {order}"] + [f"{k}: {v}" for k, v in records[2:]]
    if not report.passed:
        raise JumpcohError("\n".join(table))
    return _emit(args.format, table, records)


def _class_for(args, model, d):
    direction = _direction(args.direction)
    alpha = parse_class(args.cls, model, d.params, direction)
    if alpha.params.count:
        if not all(c.is_constant() for _, c in alpha.items()):
            raise InvalidInputError("the class expression uses parameters; pass --direction to substitute them")
        alpha = parse_class(args.cls, model)
    return alpha, direction


def cmd_obstruct(args) -> str:
    model, deformations = _load(args)
    d = _pick_deformation(args, deformations)
    alpha, direction = _class_for(args, model, d)
    n = args.order
    if n < 1:
        raise _UsageError("--order must be at least 1")
    result = extend_class(d, alpha, n - 1, direction)
    if isinstance(result, ObstructionCertificate):
        raise JumpcohError(
            f"{alpha.render('cli')} is already obstructed at order {result.failed_at}: "
            f"o{result.failed_at} = {result.obstruction.render('cli')}"
        )
    step = obstruction_step(result.deformation, result)
    text = step.render("cli")
    records = [("class", alpha.render("cli")), ("order", n), (f"o{n}", text), ("zero", "yes" if step.is_zero else "no")]
    if direction is not None:
        records.insert(1, ("direction", _vec(direction)))
    return _emit(args.format, [f"o{n} = {text}"], records)


def cmd_extend(args) -> str:
    model, deformations = _load(args)
    d = _pick_deformation(args, deformations)
    alpha, direction = _class_for(args, model, d)
    result = extend_class(d, alpha, args.max_order, direction)
    records = [("class", alpha.render("cli")), ("direction", _vec(direction)), ("max_order", args.max_order)]
    if isinstance(result, ObstructionCertificate):
        obs = result.obstruction
        records += [
            ("status", "obstructed"),
            ("achieved", result.achieved),
            ("failed_at", result.failed_at),
            (f"o{result.failed_at}", obs.render("cli")),
            ("certificate", obs.leading().render("cli")),
        ]
        table = [
            f"{alpha.render('cli')}: obstructed at order {result.failed_at}",
            f"o{result.failed_at} = {obs.render('cli')}",
            f"certificate: {obs.leading().render('cli')}",
        ]
    else:
        records += [("status", "extended"), ("achieved", result.achieved)]
        table = [f"{alpha.render('cli')}: extends to order {result.achieved}"]
        for j, corr in enumerate(result.corrections, 1):
            records.append((f"correction.{j}", corr.render("cli")))
            table.append(f"  alpha^({j}) = {corr.render('cli')}")
    return _emit(args.format, table, records)


def cmd_jump_report(args) -> str:
    model, deformations = _load(args)
    d = _pick_deformation(args, deformations)
    report = jump_report(d, _direction(args.direction), args.max_order)
    return report.records() if args.format == "records" else report.table()


# jet commands ------------------------------------------------------------

def _complex(args):
    return parse_complex(Path(args.file).read_text(encoding="utf-8"))


def cmd_jet_cohomology(args) -> str:
    C = _complex(args)
    res = truncated_cohomology(C, args.degree, args.order)
    table = [f"H^{args.degree}(E ⊗ A_{args.order}): dimension {res.dimension}, generators {res.minimal_generators}"]
    records = [("degree", args.degree), ("order", args.order), ("dimension", res.dimension), ("generators", res.minimal_generators)]
    for k, cls in enumerate(res.classes):
        table.append(f"  class {k}: {cls}")
        records.append((f"class.{k}", str(cls)))
    return _emit(args.format, table, records)


def cmd_jet_extend(args) -> str:
    C = _complex(args)
    res = extend_oracle(C, args.degree, parse_vector(args.cls), args.max_order)
    records = [("degree", args.degree), ("achieved", res.achieved), ("extension", str(res.extension))]
    table = [f"achieved order {res.achieved}", f"extension: {res.extension}"]
    if res.obstructed:
        records += [("failed_at", res.failed_at), ("obstruction", _vec(res.obstruction.coeffs[0]))]
        table += [f"fails at order {res.failed_at}", f"obstruction: [{_vec(res.obstruction.coeffs[0])}]"]
    return _emit(args.format, table, records)


def cmd_jet_second_class(args) -> str:
    C = _complex(args)
    res = second_class_detect(C, args.degree, parse_vector(args.cls), args.max_order)
    if res is None:
        return _emit(args.format, ["no witness"], [("second_class", "no")])
    table = [f"second-class: n={res.order}, alpha={res.alpha}"]
    records = [("second_class", "yes"), ("order", res.order), ("alpha", str(res.alpha))]
    return _emit(args.format, table, records)


def cmd_jet_jump(args) -> str:
    C = _complex(args)
    top = args.max_order if args.max_order is not None else C.truncation
    table = ["q  h(0)  h(generic)  jump  first  second  stable"]
    records = [("truncation", C.truncation), ("max_order", top)]
    for q in range(C.length + 1):
        a = jump_accounting(C, q, top)
        table.append(f"{q}  {a.h_fiber:>4}  {a.h_generic:>10}  {a.jump:>4}  {a.first_class_dim:>5}  {a.second_class_dim:>6}  {'yes' if a.stable else 'no'}")
        records += [
            (f"degree.{q}.h_fiber", a.h_fiber),
            (f"degree.{q}.h_generic", a.h_generic),
            (f"degree.{q}.jump", a.jump),
            (f"degree.{q}.first_class_dim", a.first_class_dim),
            (f"degree.{q}.second_class_dim", a.second_class_dim),
            (f"degree.{q}.stable", "yes" if a.stable else "no"),
        ]
    return _emit(args.format, table, records)


def cmd_jet_random(args) -> str:
    rng = random.Random(args.seed)
    chunks = []
    for k in range(args.count):
        C = random_complex(rng)
        chunks.append(f"# complex {k} (seed {args.seed})\n" + render_complex(C))
    return "\n".join(chunks).rstrip("\n")


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "records"), default="table")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")

    model_flags = argparse.ArgumentParser(add_help=False)
    model_flags.add_argument("--model", default=str(bundled_model_path()), help="model file (default: bundled Iwasawa model)")
    model_flags.add_argument("--deformation", default=None, help="deformation section name (default: first)")

    parser = argparse.ArgumentParser(prog="jumpcoh", description="Cohomology jumps of tangent-valued forms on invariant models.")
    sub = parser.add_subparsers(dest="command", required=True)
    parents = [common, model_flags]

    p = sub.add_parser("check-model", parents=parents, help="validate a model file")
    p.set_defaults(func=cmd_check_model)
    p = sub.add_parser("cohomology", parents=parents, help="h^q(T_X) and representatives")
    p.set_defaults(func=cmd_cohomology)
    p = sub.add_parser("mc-check", parents=parents, help="Maurer–Cartan and D∘D check")
    p.add_argument("--order", type=int, default=None)
    p.set_defaults(func=cmd_mc_check)
    p = sub.add_parser("obstruct", parents=parents, help="order-n obstruction of a class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--direction", default=None)
    p.set_defaults(func=cmd_obstruct)
    p = sub.add_parser("extend", parents=parents, help="extend a class along a direction")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--direction", required=True)
    p.set_defaults(func=cmd_extend)
    p = sub.add_parser("jump-report", parents=parents, help="jumping of h^q along a direction")
    p.add_argument("--direction", required=True)
    p.add_argument("--max-order", type=int, default=4)
    p.set_defaults(func=cmd_jump_report)

    jet = sub.add_parser("jet", help="one-parameter complexes from a complex file")
    jsub = jet.add_subparsers(dest="jet_command", required=True)
    p = jsub.add_parser("cohomology", parents=[common])
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(func=cmd_jet_cohomology)
    p = jsub.add_parser("extend", parents=[common])
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--class", dest="cls", required=True, help="fibre cocycle, comma separated")
    p.add_argument("--max-order", type=int, required=True)
    p.set_defaults(func=cmd_jet_extend)
    p = jsub.add_parser("second-class", parents=[common])
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--class", dest="cls", required=True, help="fibre cocycle, comma separated")
    p.add_argument("--max-order", type=int, required=True)
    p.set_defaults(func=cmd_jet_second_class)
    p = jsub.add_parser("jump", parents=[common])
    p.add_argument("file")
    p.add_argument("--max-order", type=int, default=None)
    p.set_defaults(func=cmd_jet_jump)
    p = jsub.add_parser("random", parents=[common])
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=cmd_jet_random)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except JumpcohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if out:
        print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
