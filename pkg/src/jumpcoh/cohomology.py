"""Cohomology of finite complexes of Q(i)-vector spaces, and of the invariant model."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import NotACocycleError
from .forms import LieModel, TVForm, dbar
from .linalg import EchelonBasis, LinearSolver, matvec, transpose
from .scalars import ZERO, Jet, ParamSet

__all__ = [
    "FiniteCohomology",
    "CohomologySpace",
    "complex_cohomology",
    "reduce_class",
    "basis_index",
]


class FiniteCohomology:
    """``ker(outgoing) / im(incoming)`` at a space of dimension ``dim``.

    ``incoming`` is ``dim × a`` (may be ``None``), ``outgoing`` is ``c × dim``.
    Representatives are kernel basis vectors (free-column order) that are
    independent modulo the image, picked greedily.
    """

    def __init__(self, dim: int, incoming: Sequence[Sequence] | None, outgoing: Sequence[Sequence] | None):
        self.dim = dim
        self.incoming = [list(r) for r in incoming] if incoming else None
        self.source_dim = len(self.incoming[0]) if self.incoming and self.incoming[0] else 0
        self.outgoing = [list(r) for r in outgoing] if outgoing else None
        image = EchelonBasis(dim)
        if self.incoming and self.source_dim:
            for col in transpose(self.incoming):
                image.add(col)
        self.image = image
        if self.outgoing:
            kernel = LinearSolver(self.outgoing, dim).nullspace()
        else:
            kernel = [[ZERO] * k + [ZERO + 1] + [ZERO] * (dim - k - 1) for k in range(dim)]
        self.kernel = kernel
        span = EchelonBasis(dim)
        for row in image.rows():
            span.add(row)
        reps = []
        for vec in kernel:
            if span.add(vec):
                reps.append(vec)
        self.representatives = reps
        columns = [list(v) for v in reps]
        if self.incoming and self.source_dim:
            columns += transpose(self.incoming)
        self._ncols = len(columns)
        self._solver = LinearSolver(transpose(columns, dim), self._ncols) if columns else None

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def is_cocycle(self, vec: Sequence) -> bool:
        return not self.outgoing or not any(matvec(self.outgoing, vec))

    def is_coboundary(self, vec: Sequence) -> bool:
        return self.image.contains(vec)

    def reduce(self, vec: Sequence) -> tuple[list, list]:
        """``vec = Σ coords_k rep_k + incoming · witness``."""
        if not self.is_cocycle(vec):
            raise NotACocycleError("vector is not closed", matvec(self.outgoing, vec))
        h = self.dimension
        if self._solver is None:
            return [], [ZERO] * self.source_dim
        x = self._solver.solve(list(vec))
        if x is None:  # cannot happen for cocycles: reps + image span the kernel
            raise NotACocycleError("vector outside kernel span")
        return x[:h], x[h:] if self.source_dim else []


def basis_index(model: LieModel, q: int):
    """The stable enumeration ``[(i, J), ...]`` of degree-``q`` generators."""
    return model.basis(q)


@dataclass
class CohomologySpace:
    """``H^q(X, T_X)`` of the invariant model with chosen representatives."""

    model: LieModel
    degree: int
    linear: FiniteCohomology = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.linear.dimension

    @property
    def representatives(self) -> list[TVForm]:
        return [TVForm.from_vector(self.model, self.degree, v) for v in self.linear.representatives]

    def representative(self, k: int, params: ParamSet | None = None, order: int = 0) -> TVForm:
        form = TVForm.from_vector(self.model, self.degree, self.linear.representatives[k])
        return form if params is None else form.lift(params, order)

    def reduce(self, form: TVForm) -> tuple[list[Jet], TVForm]:
        return reduce_class(self, form)

    def combination(self, coords: Sequence[Jet]) -> TVForm:
        """``Σ coords_k · rep_k`` in the ring of the coordinates."""
        total = None
        for k, c in enumerate(coords):
            term = self.representative(k).lift(c.params, c.order).scale(c)
            total = term if total is None else total + term
        if total is None:
            return TVForm.zero(self.model, self.degree)
        return total


@lru_cache(maxsize=64)
def complex_cohomology(model: LieModel) -> tuple[CohomologySpace, ...]:
    """``H^q`` for ``q = 0..dim`` of the untwisted invariant complex."""
    spaces = []
    n = model.dim
    for q in range(n + 1):
        dim_q = len(model.basis(q))
        incoming = model.dbar_matrix(q - 1) if q > 0 else None
        outgoing = model.dbar_matrix(q) if q < n else None
        spaces.append(CohomologySpace(model, q, FiniteCohomology(dim_q, incoming, outgoing)))
    return tuple(spaces)


def reduce_class(space: CohomologySpace, form: TVForm) -> tuple[list[Jet], TVForm]:
    """Coordinates (jets) in the representatives plus a witness with
    ``form = Σ coords_k rep_k + ∂̄(witness)``."""
    if form.degree != space.degree and form:
        raise NotACocycleError(f"form of degree {form.degree} reduced in H^{space.degree}")
    defect = dbar(form)
    if defect:
        raise NotACocycleError("form is not ∂̄-closed", defect)
    params, order = form.params, form.order
    model = space.model
    h = space.dimension
    coords: list[dict] = [dict() for _ in range(h)]
    prev_basis = model.basis(space.degree - 1) if space.degree > 0 else []
    witness_terms: dict = {}
    for exp, vec in form.monomial_vectors().items():
        c, w = space.linear.reduce(vec)
        for k, v in enumerate(c):
            if v:
                coords[k][exp] = v
        for key, v in zip(prev_basis, w):
            if v:
                witness_terms.setdefault(key, {})[exp] = v
    jets = [Jet(params, order, terms) for terms in coords]
    witness = TVForm(
        model,
        max(space.degree - 1, 0),
        {key: Jet(params, order, terms) for key, terms in witness_terms.items()},
        params,
        order,
    )
    return jets, witness
