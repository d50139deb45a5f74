"""Invariant Dolbeault model of a holomorphically parallelisable nilmanifold-type space.

A :class:`LieModel` is a complex Lie algebra given by structure constants in a
basis ``θ_1..θ_n`` (all indices here are 1-based, as in the model files).
Tangent-valued ``(0,q)``-forms are finite sums ``f · θ_i ⊗ φ̄_J`` with ``J``
strictly increasing and ``f`` a :class:`~jumpcoh.scalars.Jet` in the
deformation parameters.  Since the tangent bundle is trivialised by the
``θ_i``, ``∂̄`` only sees the form part, where ``∂̄φ̄_k = -Σ_{i<j}
conj(c_ij^k) φ̄_i∧φ̄_j``.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import DegreeRangeError, ModelError, ParameterMismatchError
from .scalars import ZERO, GaussianRational, Jet, ParamSet, gaussian

__all__ = [
    "LieModel",
    "TVForm",
    "wedge_sign",
    "dbar",
    "bracket",
    "leibniz_defect",
    "truncate_form",
]

Key = tuple[int, tuple[int, ...]]

EMPTY = ParamSet(())


def wedge_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort a list of 1-form indices; returns ``(sign, sorted)`` or ``(0, ())`` on repeats."""
    if len(set(seq)) != len(seq):
        return 0, ()
    items = list(seq)
    sign = 1
    # insertion sort; each swap flips the sign
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1] > items[b]:
            items[b - 1], items[b] = items[b], items[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(items)


class LieModel:
    """Finite-dimensional complex Lie algebra with exact structure constants."""

    def __init__(self, dim: int, constants: Mapping[tuple[int, int], Mapping[int, object]] | None = None, name: str = "model"):
        if dim < 1:
            raise ModelError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.name = name
        table: dict[tuple[int, int], dict[int, GaussianRational]] = {}
        for (i, j), row in (constants or {}).items():
            for k, value in row.items():
                self._store(table, i, j, k, gaussian(value))
        self._c = table
        failures = self.jacobi_failures()
        if failures:
            i, j, k = failures[0]
            raise ModelError(f"Jacobi identity fails for (θ{i}, θ{j}, θ{k})")
        self._dbar_cache: dict[Key, dict[Key, GaussianRational]] = {}

    def _store(self, table, i, j, k, value):
        n = self.dim
        if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
            raise ModelError(f"bracket indices ({i}, {j}, {k}) outside 1..{n}")
        if i == j:
            if value:
                raise ModelError(f"antisymmetry forces [θ{i}, θ{i}] = 0")
            return
        for (a, b), v in (((i, j), value), ((j, i), -value)):
            row = table.setdefault((a, b), {})
            old = row.get(k)
            if old is not None and old != v:
                raise ModelError(
                    f"antisymmetry failure: [θ{a}, θ{b}] has θ{k}-coefficient {old} and {v}"
                )
            if v:
                row[k] = v

    @classmethod
    def from_triples(cls, dim: int, triples: Iterable[tuple[int, int, int, object]], name: str = "model") -> "LieModel":
        """Build from ``(i, j, k, c)`` meaning ``[θ_i, θ_j] ∋ c·θ_k``; antisymmetry is completed."""
        constants: dict[tuple[int, int], dict[int, object]] = {}
        probe = cls.__new__(cls)
        probe.dim = dim
        table: dict = {}
        for i, j, k, c in triples:
            probe._store(table, i, j, k, gaussian(c))
        for key, row in table.items():
            constants[key] = dict(row)
        return cls(dim, constants, name)

    @classmethod
    def abelian(cls, dim: int, name: str = "abelian") -> "LieModel":
        return cls(dim, {}, name)

    # structure ----------------------------------------------------------
    def structure_constant(self, i: int, j: int, k: int) -> GaussianRational:
        return self._c.get((i, j), {}).get(k, ZERO)

    def bracket_generators(self, i: int, j: int) -> dict[int, GaussianRational]:
        return self._c.get((i, j), {})

    def bracket_triples(self) -> list[tuple[int, int, int, GaussianRational]]:
        """Nonzero constants with ``i < j``, sorted."""
        out = []
        for (i, j), row in sorted(self._c.items()):
            if i < j:
                out.extend((i, j, k, v) for k, v in sorted(row.items()))
        return out

    def _bracket_vec(self, x: Mapping[int, GaussianRational], y: Mapping[int, GaussianRational]):
        out: dict[int, GaussianRational] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.bracket_generators(i, j).items():
                    out[k] = out.get(k, ZERO) + a * b * c
        return {k: v for k, v in out.items() if v}

    def jacobi_failures(self) -> list[tuple[int, int, int]]:
        fails = []
        n = self.dim
        for i, j, k in combinations(range(1, n + 1), 3):
            ei, ej, ek = {i: 1}, {j: 1}, {k: 1}
            total: dict[int, GaussianRational] = {}
            for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
                for idx, v in self._bracket_vec(self._bracket_vec(a, b), c).items():
                    total[idx] = total.get(idx, ZERO) + gaussian(v)
            if any(total.values()):
                fails.append((i, j, k))
        return fails

    def is_nilpotent(self) -> bool:
        """Lower central series reaches zero (reported, never required)."""
        from .linalg import EchelonBasis

        n = self.dim
        layer = [{i: gaussian(1)} for i in range(1, n + 1)]
        previous = n
        while layer:
            span = EchelonBasis(n)
            for x in layer:
                for i in range(1, n + 1):
                    v = self._bracket_vec({i: gaussian(1)}, x)
                    span.add([v.get(k, ZERO) for k in range(1, n + 1)])
            if span.rank == 0:
                return True
            if span.rank == previous:
                return False
            previous = span.rank
            layer = [{k + 1: c for k, c in enumerate(row) if c} for row in span.rows()]
        return True

    def dbar_phibar(self, k: int) -> dict[tuple[int, int], GaussianRational]:
        """``∂̄φ̄_k`` as ``{(a, b): coeff}`` with ``a < b``."""
        out = {}
        for (a, b), row in self._c.items():
            if a < b and k in row:
                out[(a, b)] = -row[k].conjugate()
        return out

    # basis --------------------------------------------------------------
    def multi_indices(self, q: int) -> list[tuple[int, ...]]:
        return list(combinations(range(1, self.dim + 1), q))

    def basis(self, q: int) -> list[Key]:
        """Generators ``(i, J)`` of degree ``q`` ordered by vector index then multi-index."""
        if q < 0 or q > self.dim:
            return []
        return [(i, J) for i in range(1, self.dim + 1) for J in self.multi_indices(q)]

    @cached_property
    def _basis_index(self) -> dict[int, dict[Key, int]]:
        return {q: {key: pos for pos, key in enumerate(self.basis(q))} for q in range(self.dim + 1)}

    def basis_position(self, q: int, key: Key) -> int:
        return self._basis_index[q][key]

    def dbar_generator(self, key: Key) -> dict[Key, GaussianRational]:
        cached = self._dbar_cache.get(key)
        if cached is not None:
            return cached
        i, J = key
        out: dict[Key, GaussianRational] = {}
        for p, k in enumerate(J):
            sign_p = -1 if p % 2 else 1
            for (a, b), coeff in self.dbar_phibar(k).items():
                sign, K = wedge_sign(J[:p] + (a, b) + J[p + 1 :])
                if sign:
                    out[(i, K)] = out.get((i, K), ZERO) + coeff * (sign * sign_p)
        out = {kk: v for kk, v in out.items() if v}
        self._dbar_cache[key] = out
        return out

    def dbar_matrix(self, q: int) -> list[list[GaussianRational]]:
        """Matrix of ``∂̄`` from degree ``q`` to ``q+1`` (rows: targets)."""
        rows = self.basis(q + 1)
        cols = self.basis(q)
        idx = {key: r for r, key in enumerate(rows)}
        mat = [[ZERO] * len(cols) for _ in rows]
        for c, key in enumerate(cols):
            for target, v in self.dbar_generator(key).items():
                mat[idx[target]][c] = v
        return mat

    # convenience --------------------------------------------------------
    def generator(self, i: int, J: Sequence[int] = (), params: ParamSet = EMPTY, order: int = 0, coefficient=1) -> "TVForm":
        """``coefficient · θ_i ⊗ φ̄_J``; ``J`` may be unsorted (the wedge sign is applied)."""
        sign, K = wedge_sign(tuple(J))
        if not sign:
            return TVForm.zero(self, len(J), params, order)
        if not isinstance(coefficient, Jet):
            coefficient = Jet.constant(params, order, gaussian(coefficient))
        return TVForm(self, len(J), {(i, K): coefficient * sign}, coefficient.params, coefficient.order)

    def __eq__(self, other):
        return isinstance(other, LieModel) and self.dim == other.dim and self._c == other._c

    def __hash__(self):
        return hash((self.dim, tuple(self.bracket_triples())))

    def __repr__(self):
        return f"LieModel({self.name!r}, dim={self.dim}, brackets={len(self.bracket_triples())})"


class TVForm:
    """Tangent-valued invariant ``(0,q)``-form with jet coefficients."""

    __slots__ = ("model", "degree", "params", "order", "_terms")

    def __init__(self, model: LieModel, degree: int, terms: Mapping[Key, object] | None = None, params: ParamSet = EMPTY, order: int = 0):
        if degree < 0:
            raise DegreeRangeError(f"negative form degree {degree}")
        self.model = model
        self.degree = degree
        self.params = params
        self.order = order
        clean: dict[Key, Jet] = {}
        for (i, J), coeff in (terms or {}).items():
            J = tuple(J)
            if len(J) != degree or list(J) != sorted(set(J)):
                raise DegreeRangeError(f"multi-index {J} is not strictly increasing of length {degree}")
            if not (1 <= i <= model.dim) or any(not 1 <= j <= model.dim for j in J):
                raise DegreeRangeError(f"index out of range in θ{i}⊗φ̄{J}")
            if not isinstance(coeff, Jet):
                coeff = Jet.constant(params, order, gaussian(coeff))
            elif coeff.params != params or coeff.order != order:
                raise ParameterMismatchError("coefficient jet does not match the form's ring")
            if coeff:
                clean[(i, J)] = coeff
        if clean and degree > model.dim:
            raise DegreeRangeError(f"degree {degree} exceeds dimension {model.dim}")
        self._terms = clean

    @classmethod
    def _wrap(cls, model, degree, terms, params, order) -> "TVForm":
        obj = cls.__new__(cls)
        obj.model, obj.degree, obj.params, obj.order = model, degree, params, order
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls, model: LieModel, degree: int, params: ParamSet = EMPTY, order: int = 0) -> "TVForm":
        return cls._wrap(model, degree, {}, params, order)

    @classmethod
    def from_vector(cls, model: LieModel, degree: int, vector: Sequence, params: ParamSet = EMPTY, order: int = 0) -> "TVForm":
        """Scalar coordinates in :meth:`LieModel.basis` order."""
        terms = {}
        for key, v in zip(model.basis(degree), vector):
            v = v if isinstance(v, Jet) else gaussian(v)
            if v:
                terms[key] = v if isinstance(v, Jet) else Jet.constant(params, order, v)
        return cls(model, degree, terms, params, order)

    # access -------------------------------------------------------------
    @property
    def terms(self) -> dict[Key, Jet]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, i: int, J: Sequence[int]) -> Jet:
        return self._terms.get((i, tuple(J)), Jet.zero(self.params, self.order))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def to_vector(self) -> list[GaussianRational]:
        """Coordinates of a form with constant coefficients."""
        out = []
        for key in self.model.basis(self.degree):
            c = self._terms.get(key)
            if c is None:
                out.append(ZERO)
            elif not c.is_constant():
                raise ParameterMismatchError("form has non-constant coefficients")
            else:
                out.append(c.constant_term())
        return out

    def monomial_vectors(self) -> dict[tuple[int, ...], list[GaussianRational]]:
        """Split into ``{exponent: coordinate vector}`` over the basis of this degree."""
        basis = self.model.basis(self.degree) if self.degree <= self.model.dim else []
        pos = {key: p for p, key in enumerate(basis)}
        out: dict[tuple[int, ...], list[GaussianRational]] = {}
        for key, jet in self._terms.items():
            for exp, c in jet.terms.items():
                vec = out.setdefault(exp, [ZERO] * len(basis))
                vec[pos[key]] = c
        return out

    # ring handling ------------------------------------------------------
    def lift(self, params: ParamSet, order: int) -> "TVForm":
        """Embed constant-coefficient forms into a parameter ring (or re-order)."""
        if params == self.params:
            if order == self.order:
                return self
            return TVForm._wrap(self.model, self.degree, _nonzero({k: c.with_order(order) for k, c in self._terms.items()}), params, order)
        if self.params.count == 0:
            terms = {k: Jet.constant(params, order, c.constant_term()) for k, c in self._terms.items()}
            return TVForm._wrap(self.model, self.degree, terms, params, order)
        raise ParameterMismatchError(f"cannot move a form over {self.params.names} to {params.names}")

    def _common(self, other: "TVForm") -> tuple["TVForm", "TVForm"]:
        if self.model is not other.model and self.model != other.model:
            raise ParameterMismatchError("forms belong to different Lie models")
        if self.params == other.params and self.order == other.order:
            return self, other
        if other.params.count == 0:
            return self, other.lift(self.params, self.order)
        if self.params.count == 0:
            return self.lift(other.params, other.order), other
        raise ParameterMismatchError("forms have different coefficient rings")

    # linear structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TVForm):
            return NotImplemented
        a, b = self._common(other)
        if a.degree != b.degree:
            if not a:
                return b
            if not b:
                return a
            raise DegreeRangeError(f"cannot add forms of degree {a.degree} and {b.degree}")
        terms = dict(a._terms)
        for k, c in b._terms.items():
            v = terms.get(k)
            terms[k] = c if v is None else v + c
        return TVForm._wrap(a.model, a.degree, _nonzero(terms), a.params, a.order)

    def __neg__(self):
        return TVForm._wrap(self.model, self.degree, {k: -c for k, c in self._terms.items()}, self.params, self.order)

    def __sub__(self, other):
        if not isinstance(other, TVForm):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "TVForm":
        if isinstance(factor, Jet):
            if factor.params != self.params or factor.order != self.order:
                if self.params.count == 0:
                    return self.lift(factor.params, factor.order).scale(factor)
                raise ParameterMismatchError("scaling jet does not match the form's ring")
        else:
            factor = gaussian(factor)
        return TVForm._wrap(self.model, self.degree, _nonzero({k: c * factor for k, c in self._terms.items()}), self.params, self.order)

    def __mul__(self, factor):
        if isinstance(factor, TVForm):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TVForm):
            return NotImplemented
        try:
            a, b = self._common(other)
        except ParameterMismatchError:
            return False
        if not a._terms and not b._terms:
            return True
        return a.degree == b.degree and a._terms == b._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def map_coefficients(self, fn) -> "TVForm":
        """Apply ``fn`` to every coefficient jet; the ring is taken from the results."""
        mapped = {k: fn(c) for k, c in self._terms.items()}
        mapped = {k: c for k, c in mapped.items() if c}
        if mapped:
            sample = next(iter(mapped.values()))
            return TVForm._wrap(self.model, self.degree, mapped, sample.params, sample.order)
        probe = fn(Jet.zero(self.params, self.order))
        return TVForm._wrap(self.model, self.degree, {}, probe.params, probe.order)

    def homogeneous_part(self, k: int) -> "TVForm":
        return TVForm._wrap(self.model, self.degree, _nonzero({key: c.homogeneous_part(k) for key, c in self._terms.items()}), self.params, self.order)

    def truncate(self, n: int) -> "TVForm":
        return self.map_coefficients(lambda c: c.truncate(n)) if self._terms else TVForm.zero(self.model, self.degree, self.params, n)

    def substitute_curve(self, direction: Sequence) -> "TVForm":
        if not self._terms:
            return TVForm.zero(self.model, self.degree, ParamSet(("s",)), self.order)
        return self.map_coefficients(lambda c: c.substitute_curve(direction))

    def valuation(self) -> int | None:
        vals = [c.valuation() for c in self._terms.values()]
        return min(vals) if vals else None

    # rendering ----------------------------------------------------------
    def render(self, style: str = "unicode") -> str:
        if not self._terms:
            return "0"
        if style == "unicode":
            parts = []
            for (i, J), c in self.items():
                form = f"θ{i}"
                if len(J) == 1:
                    form += f"⊗φ̄{J[0]}"
                elif J:
                    form += "⊗(" + "∧".join(f"φ̄{j}" for j in J) + ")"
                parts.append(f"({c})·{form}")
            return " + ".join(parts)
        if style != "cli":
            raise ValueError(f"unknown render style {style!r}")
        pieces: list[tuple[int, str]] = []
        for (i, J), c in self.items():
            form = f"theta{i}"
            if J:
                form += "⊗" + "∧".join(f"phibar{j}" for j in J)
            jet_terms = c.render_terms()
            if len(jet_terms) == 1:
                sign, body = jet_terms[0]
                if body == "1":
                    pieces.append((sign, form))
                else:
                    pieces.append((sign, f"{body}*{form}"))
            else:
                pieces.append((1, f"({c})*{form}"))
        text = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += (" - " if sign < 0 else " + ") + body
        return text

    def __str__(self):
        return self.render("unicode")

    def __repr__(self):
        return f"TVForm(q={self.degree}: {self.render('unicode')})"


def _nonzero(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v}


def dbar(form: TVForm) -> TVForm:
    """``id ⊗ ∂̄`` on the invariant complex; coefficients are constant along the fibre."""
    model = form.model
    out: dict[Key, Jet] = {}
    for key, coeff in form._terms.items():
        for target, v in model.dbar_generator(key).items():
            term = coeff * v
            old = out.get(target)
            out[target] = term if old is None else old + term
    return TVForm._wrap(model, form.degree + 1, _nonzero(out), form.params, form.order)


def bracket(a: TVForm, b: TVForm) -> TVForm:
    """Graded bracket ``[θ_i⊗φ̄_I, θ_j⊗φ̄_J] = [θ_i, θ_j] ⊗ φ̄_I∧φ̄_J``."""
    a, b = a._common(b)
    model = a.model
    degree = a.degree + b.degree
    if degree > model.dim:
        return TVForm._wrap(model, degree, {}, a.params, a.order)
    out: dict[Key, Jet] = {}
    for (i, I), f in a._terms.items():
        for (j, J), g in b._terms.items():
            consts = model.bracket_generators(i, j)
            if not consts:
                continue
            sign, K = wedge_sign(I + J)
            if not sign:
                continue
            fg = f * g
            if not fg:
                continue
            for k, c in consts.items():
                term = fg * (c * sign)
                old = out.get((k, K))
                out[(k, K)] = term if old is None else old + term
    return TVForm._wrap(model, degree, _nonzero(out), a.params, a.order)


def leibniz_defect(a: TVForm, b: TVForm) -> TVForm:
    """``∂̄[a,b] − [∂̄a, b] − (−1)^{deg a}[a, ∂̄b]``; identically zero."""
    sign = -1 if a.degree % 2 else 1
    return dbar(bracket(a, b)) - bracket(dbar(a), b) - bracket(a, dbar(b)).scale(sign)


def truncate_form(form: TVForm, n: int) -> TVForm:
    if n < 0:
        raise DegreeRangeError(f"negative truncation degree {n}")
    return form.truncate(n)
