"""Model files, the bundled Iwasawa fixture and class expressions.

Model grammar (line oriented, ``#`` starts a comment)::

    model <name>
    dim <n>
    bracket <i> <j> -> <k> : <gaussian-rational>
    deformation <name>
    params <id> <id> ...
    term <polynomial in params> : <vector index> | <conj indices, comma separated>
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path
from typing import Sequence

from .deformation import DeformationMC, mc_check
from .errors import JumpcohError, ModelError, ParseError
from .expr import evaluate, parse_gaussian, parse_jet
from .forms import EMPTY, LieModel, TVForm, wedge_sign
from .scalars import ONE, GaussianRational, Jet, ParamSet, gaussian

__all__ = [
    "parse_model",
    "render_model",
    "load_model",
    "bundled_model_path",
    "bundled_model",
    "parse_class",
    "class_names",
]

_BRACKET = re.compile(r"^bracket\s+(\d+)\s+(\d+)\s*->\s*(\d+)\s*:\s*(.+)$")
_PARSE_ORDER = 64


def bundled_model_path() -> Path:
    return Path(str(resources.files("jumpcoh") / "data" / "iwasawa.model"))


def load_model(path: str | Path) -> tuple[LieModel, list[DeformationMC]]:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def bundled_model() -> tuple[LieModel, list[DeformationMC]]:
    return load_model(bundled_model_path())


class _Section:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.params: ParamSet | None = None
        self.terms: list[tuple[str, int, tuple[int, ...], int]] = []


def parse_model(text: str) -> tuple[LieModel, list[DeformationMC]]:
    """Parse a model file; every failure is a :class:`ParseError` carrying its line."""
    name = None
    dim = None
    dim_line = None
    table: dict = {}
    last_bracket_line = None
    sections: list[_Section] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        rest = line[len(head):].strip()
        if head == "model":
            if name is not None:
                raise ParseError("duplicate model line", lineno)
            if not rest:
                raise ParseError("model needs a name", lineno)
            name = rest
        elif head == "dim":
            if dim is not None:
                raise ParseError("duplicate dim line", lineno)
            try:
                dim = int(rest)
            except ValueError:
                raise ParseError(f"dim must be an integer, got {rest!r}", lineno) from None
            if dim < 1:
                raise ParseError("dim must be positive", lineno)
            dim_line = lineno
        elif head == "bracket":
            if dim is None:
                raise ParseError("bracket before dim", lineno)
            if sections:
                raise ParseError("bracket lines must precede deformation sections", lineno)
            m = _BRACKET.match(line)
            if not m:
                raise ParseError("expected 'bracket <i> <j> -> <k> : <coefficient>'", lineno)
            i, j, k = (int(m.group(g)) for g in (1, 2, 3))
            try:
                value = parse_gaussian(m.group(4))
                probe = LieModel.__new__(LieModel)
                probe.dim = dim
                probe._store(table, i, j, k, value)
            except JumpcohError as exc:
                raise ParseError(str(exc), lineno) from None
            last_bracket_line = lineno
        elif head == "deformation":
            if dim is None:
                raise ParseError("deformation before dim", lineno)
            if not rest:
                raise ParseError("deformation needs a name", lineno)
            sections.append(_Section(rest, lineno))
        elif head == "params":
            if not sections:
                raise ParseError("params outside a deformation section", lineno)
            if sections[-1].params is not None:
                raise ParseError("duplicate params line", lineno)
            try:
                sections[-1].params = ParamSet(tuple(rest.split()))
            except (ValueError, JumpcohError) as exc:
                raise ParseError(str(exc), lineno) from None
        elif head == "term":
            if not sections:
                raise ParseError("term outside a deformation section", lineno)
            if sections[-1].params is None:
                raise ParseError("term before params", lineno)
            sections[-1].terms.append(_parse_term(rest, dim, lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if name is None:
        raise ParseError("missing model line")
    if dim is None:
        raise ParseError("missing dim line")
    try:
        model = LieModel(dim, table, name)
    except ModelError as exc:
        raise ParseError(str(exc), last_bracket_line or dim_line) from None
    deformations = [_build_deformation(model, sec) for sec in sections]
    return model, deformations


def _parse_term(rest: str, dim: int, lineno: int):
    if ":" not in rest or "|" not in rest:
        raise ParseError("expected 'term <polynomial> : <i> | <j1,j2,...>'", lineno)
    poly, form = rest.rsplit(":", 1)
    vec, conj = form.split("|", 1)
    try:
        i = int(vec)
        J = tuple(int(x) for x in conj.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"bad indices in {form.strip()!r}", lineno) from None
    if not 1 <= i <= dim or any(not 1 <= j <= dim for j in J):
        raise ParseError(f"index out of range 1..{dim}", lineno)
    if len(J) != 1:
        raise ParseError("deformation terms must be (0,1)-forms: exactly one conjugate index", lineno)
    return poly.strip(), i, J, lineno


def _build_deformation(model: LieModel, sec: _Section) -> DeformationMC:
    params = sec.params
    terms: dict = {}
    for poly, i, J, lineno in sec.terms:
        try:
            jet = parse_jet(poly, params, _PARSE_ORDER)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
        if jet.constant_term():
            raise ParseError("deformation coefficients must vanish at the origin", lineno)
        key = (i, J)
        terms[key] = terms[key] + jet if key in terms else jet
    degree = max((c.degree() for c in terms.values()), default=1)
    order = max(degree, 1)
    psi = TVForm(model, 1, {k: c.with_order(order) for k, c in terms.items()}, params, order)
    deformation = DeformationMC(model, psi, sec.name)
    report = mc_check(model, deformation, deformation.validity_order)
    if not report.passed:
        raise ParseError(
            f"deformation {sec.name!r} violates Maurer–Cartan; defect {report.defect.render('cli')}", sec.line
        )
    return deformation


def render_model(model: LieModel, deformations: Sequence[DeformationMC] = ()) -> str:
    lines = [f"model {model.name}", f"dim {model.dim}"]
    for i, j, k, c in model.bracket_triples():
        lines.append(f"bracket {i} {j} -> {k} : {c}")
    for d in deformations:
        lines.append("")
        lines.append(f"deformation {d.name}")
        lines.append("params " + " ".join(d.params.names))
        for (i, J), c in d.psi.items():
            lines.append(f"term {c} : {i} | {','.join(str(j) for j in J)}")
    return "\n".join(lines) + "\n"


# class expressions ----------------------------------------------------

class _Sym:
    """Linear combination of ``θ_i ⊗ φ̄_J`` monomials; vector index 0 means 'no θ yet'."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {k: v for k, v in terms.items() if v}

    def __add__(self, other):
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return _Sym(terms)

    def __neg__(self):
        return _Sym({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict = {}
        for (a, I), x in self.terms.items():
            for (b, J), y in other.terms.items():
                if a and b:
                    raise ParseError("a class expression cannot multiply two theta factors")
                sign, K = wedge_sign(I + J)
                if not sign:
                    continue
                key = (a or b, K)
                v = x * y * sign
                out[key] = out[key] + v if key in out else v
        return _Sym(out)

    def __pow__(self, k: int):
        result = _Sym({(0, ()): self._one()})
        for _ in range(k):
            result = result * self
        return result

    def _one(self):
        sample = next(iter(self.terms.values()), None)
        if isinstance(sample, Jet):
            return Jet.constant(sample.params, sample.order, ONE)
        return ONE


def class_names(model: LieModel) -> list[str]:
    return [f"theta{i}" for i in range(1, model.dim + 1)] + [f"phibar{j}" for j in range(1, model.dim + 1)]


def parse_class(
    text: str,
    model: LieModel,
    params: ParamSet | None = None,
    direction: Sequence | None = None,
    order: int = 0,
) -> TVForm:
    """Parse e.g. ``theta2``, ``theta3⊗phibar1∧phibar2`` or ``t11*theta1 + t21*theta2``.

    Parameter names are replaced by the matching ``direction`` entries; without
    a direction they stay symbolic (jets of the given ``order``).
    """
    names = params.names if params is not None else ()
    if direction is not None and len(direction) != len(names):
        raise ParseError(f"direction has {len(direction)} entries, expected {len(names)}")
    symbolic = params is not None and direction is None
    values = {n: gaussian(v) for n, v in zip(names, direction)} if direction is not None else {}

    def scalar(c: GaussianRational):
        return Jet.constant(params, order, c) if symbolic else c

    def resolve(name: str):
        m = re.fullmatch(r"(theta|phibar)(\d+)", name)
        if m:
            idx = int(m.group(2))
            if 1 <= idx <= model.dim:
                key = (idx, ()) if m.group(1) == "theta" else (0, (idx,))
                return _Sym({key: scalar(ONE)})
        elif name in names:
            if symbolic:
                return _Sym({(0, ()): Jet.variable(params, order, name)})
            return _Sym({(0, ()): values[name]})
        elif name == "i":
            return _Sym({(0, ()): scalar(GaussianRational(0, 1))})
        available = ", ".join(class_names(model) + list(names))
        raise ParseError(f"unknown name {name!r} in class expression; available: {available}")

    value = evaluate(text, resolve, lambda c: _Sym({(0, ()): scalar(c)}))
    if not isinstance(value, _Sym):
        raise ParseError(f"{text!r} is not a class expression")
    degrees = {len(J) for (_, J) in value.terms}
    if any(i == 0 for (i, _) in value.terms):
        raise ParseError(f"{text!r}: every term needs a theta factor")
    if len(degrees) > 1:
        raise ParseError(f"{text!r} mixes form degrees {sorted(degrees)}")
    degree = degrees.pop() if degrees else 0
    ring = (params, order) if symbolic else (EMPTY, 0)
    return TVForm(model, degree, value.terms, *ring)
