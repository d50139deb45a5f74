"""Exact scalars: Gaussian rationals and truncated multivariate polynomials (jets).

Everything here is immutable. A :class:`Jet` lives in
``Q(i)[t_1..t_m] / (t_1..t_m)^(N+1)``: terms of total degree above the
truncation order ``N`` are dropped on construction and after every product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DegreeRangeError, ParameterMismatchError

__all__ = [
    "GaussianRational",
    "ParamSet",
    "Jet",
    "gaussian",
    "jet_mul",
    "jet_homogeneous_part",
    "jet_truncate",
    "substitute_curve",
    "monomials",
]


class GaussianRational:
    """Exact ``a + b*i`` with rational ``a`` and ``b``.

    Stored as three integers ``(x, y, d)`` with value ``(x + y*i) / d``,
    ``d > 0`` and ``gcd(x, y, d) == 1``, which keeps arithmetic on Python ints.
    """

    __slots__ = ("_x", "_y", "_d", "_hash")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, x: int, y: int, d: int) -> None:
        g = gcd(gcd(x, y), d)
        if g != 1:
            x //= g
            y //= g
            d //= g
        self._x, self._y, self._d = x, y, d
        self._hash = None

    @classmethod
    def _raw(cls, x: int, y: int, d: int) -> "GaussianRational":
        obj = cls.__new__(cls)
        if d < 0:
            x, y, d = -x, -y, -d
        obj._set(x, y, d)
        return obj

    @property
    def re(self) -> Fraction:
        return Fraction(self._x, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._y, self._d)

    def is_real(self) -> bool:
        return self._y == 0

    def conjugate(self) -> "GaussianRational":
        if self._y == 0:
            return self
        return GaussianRational._raw(self._x, -self._y, self._d)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self._d, other._d
        if d1 == d2:
            return GaussianRational._raw(self._x + other._x, self._y + other._y, d1)
        return GaussianRational._raw(
            self._x * d2 + other._x * d1, self._y * d2 + other._y * d1, d1 * d2
        )

    __radd__ = __add__

    def __neg__(self):
        obj = GaussianRational.__new__(GaussianRational)
        obj._x, obj._y, obj._d, obj._hash = -self._x, -self._y, self._d, None
        return obj

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, e = self._x, self._y, other._x, other._y
        if b == 0 and e == 0:
            return GaussianRational._raw(a * c, 0, self._d * other._d)
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * other._d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def inverse(self) -> "GaussianRational":
        x, y, d = self._x, self._y, self._d
        if x == 0 and y == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        # d / (x + y i) = d (x - y i) / (x^2 + y^2)
        return GaussianRational._raw(d * x, -d * y, x * x + y * y)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self._x == other._x and self._y == other._y and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            if self._y == 0:
                self._hash = hash(Fraction(self._x, self._d))
            else:
                self._hash = hash((self._x, self._y, self._d))
        return self._hash

    def __bool__(self):
        return self._x != 0 or self._y != 0

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return _frac_str(re)
        if im == 1:
            im_s = "i"
        elif im == -1:
            im_s = "-i"
        else:
            im_s = f"{_frac_str(im)}*i"
        if not re:
            return im_s
        if im_s.startswith("-"):
            return f"{_frac_str(re)}{im_s}"
        return f"{_frac_str(re)}+{im_s}"


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, int):
        return GaussianRational._raw(value, 0, 1)
    if isinstance(value, Fraction):
        return GaussianRational._raw(value.numerator, 0, value.denominator)
    return NotImplemented


def gaussian(value) -> GaussianRational:
    """Coerce an int, Fraction, ``(re, im)`` pair or GaussianRational."""
    if isinstance(value, tuple):
        return GaussianRational(*value)
    coerced = _coerce(value)
    if coerced is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")
    return coerced


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


@dataclass(frozen=True)
class ParamSet:
    """Ordered, duplicate-free parameter names (local coordinates of the base)."""

    names: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ParameterMismatchError(f"duplicate parameter names in {names}")

    @property
    def count(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ParameterMismatchError(f"unknown parameter {name!r}") from None


CURVE = ParamSet(("s",))


def monomials(m: int, degree: int) -> Iterator[tuple[int, ...]]:
    """All exponent vectors of length ``m`` with total degree exactly ``degree``."""
    if m == 0:
        if degree == 0:
            yield ()
        return
    if m == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials(m - 1, degree - first):
            yield (first,) + rest


def _term_key(exp: tuple[int, ...]):
    # graded, then t11 before t12 within a degree
    return (sum(exp), tuple(-e for e in exp))


class Jet:
    """Truncated polynomial over :class:`GaussianRational`."""

    __slots__ = ("params", "order", "_terms")

    def __init__(self, params: ParamSet, order: int, terms: Mapping | None = None):
        if order < 0:
            raise DegreeRangeError(f"negative truncation order {order}")
        self.params = params
        self.order = order
        clean: dict[tuple[int, ...], GaussianRational] = {}
        if terms:
            m = len(params)
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != m:
                    raise ParameterMismatchError(
                        f"exponent {exp} does not match {m} parameters"
                    )
                if sum(exp) > order:
                    continue
                c = gaussian(c)
                if c:
                    clean[exp] = c
        self._terms = clean

    @classmethod
    def _wrap(cls, params, order, terms) -> "Jet":
        obj = cls.__new__(cls)
        obj.params = params
        obj.order = order
        obj._terms = terms
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, params: ParamSet, order: int) -> "Jet":
        return cls(params, order)

    @classmethod
    def constant(cls, params: ParamSet, order: int, value=1) -> "Jet":
        return cls(params, order, {(0,) * len(params): value})

    @classmethod
    def variable(cls, params: ParamSet, order: int, name: str) -> "Jet":
        exp = [0] * len(params)
        exp[params.index(name)] = 1
        return cls(params, order, {tuple(exp): 1})

    # access -------------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], GaussianRational]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _term_key(kv[0]))

    def coefficient(self, exp: Sequence[int]) -> GaussianRational:
        return self._terms.get(tuple(exp), ZERO)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((0,) * len(self.params), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Largest total degree present (-1 for the zero jet)."""
        return max((sum(e) for e in self._terms), default=-1)

    def valuation(self) -> int | None:
        """Smallest total degree present, ``None`` for zero."""
        return min((sum(e) for e in self._terms), default=None)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    # ring structure -----------------------------------------------------
    def _check(self, other: "Jet") -> None:
        if self.params != other.params or self.order != other.order:
            raise ParameterMismatchError(
                f"jets over {self.params.names}/order {self.order} and "
                f"{other.params.names}/order {other.order} cannot be combined"
            )

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return other
        c = _coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return Jet.constant(self.params, self.order, c)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for exp, c in other._terms.items():
            v = terms.get(exp)
            if v is None:
                terms[exp] = c
            else:
                v = v + c
                if v:
                    terms[exp] = v
                else:
                    del terms[exp]
        return Jet._wrap(self.params, self.order, terms)

    __radd__ = __add__

    def __neg__(self):
        return Jet._wrap(self.params, self.order, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = _coerce(other)
            if c is NotImplemented:
                return NotImplemented
            if not c:
                return Jet._wrap(self.params, self.order, {})
            return Jet._wrap(self.params, self.order, {e: v * c for e, v in self._terms.items()})
        self._check(other)
        order = self.order
        terms: dict[tuple[int, ...], GaussianRational] = {}
        right = [(e, sum(e), c) for e, c in other._terms.items()]
        for e1, c1 in self._terms.items():
            d1 = sum(e1)
            for e2, d2, c2 in right:
                if d1 + d2 > order:
                    continue
                exp = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                old = terms.get(exp)
                terms[exp] = v if old is None else old + v
        return Jet._wrap(self.params, order, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Jet.constant(self.params, self.order, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Jet):
            return (
                self.params == other.params
                and self.order == other.order
                and self._terms == other._terms
            )
        c = _coerce(other)
        if c is NotImplemented:
            return NotImplemented
        if not c:
            return not self._terms
        return self._terms == {(0,) * len(self.params): c}

    def __hash__(self):
        return hash((self.params, self.order, frozenset(self._terms.items())))

    # truncation and restriction ----------------------------------------
    def homogeneous_part(self, k: int) -> "Jet":
        if k < 0 or k > self.order:
            raise DegreeRangeError(f"degree {k} outside 0..{self.order}")
        return Jet._wrap(
            self.params, self.order, {e: c for e, c in self._terms.items() if sum(e) == k}
        )

    def truncate(self, n: int) -> "Jet":
        """Drop terms of total degree > n; the result lives at order n."""
        if n < 0:
            raise DegreeRangeError(f"negative truncation degree {n}")
        if n > self.order:
            raise DegreeRangeError(f"cannot truncate order-{self.order} jet to order {n}")
        return Jet._wrap(self.params, n, {e: c for e, c in self._terms.items() if sum(e) <= n})

    def with_order(self, n: int) -> "Jet":
        """Re-home the stored terms at order ``n`` (embedding when n grows)."""
        if n <= self.order:
            return self.truncate(n)
        return Jet._wrap(self.params, n, dict(self._terms))

    def substitute_curve(self, direction: Sequence, name: str = "s") -> "Jet":
        """Restrict to the line ``t = s * direction``; returns a jet in ``s``."""
        if len(direction) != len(self.params):
            raise ParameterMismatchError(
                f"direction has {len(direction)} entries, expected {len(self.params)}"
            )
        vec = [gaussian(v) for v in direction]
        params = CURVE if name == "s" else ParamSet((name,))
        terms: dict[tuple[int, ...], GaussianRational] = {}
        for exp, c in self._terms.items():
            v = c
            for x, e in zip(vec, exp):
                if e:
                    v = v * x**e
            if v:
                key = (sum(exp),)
                terms[key] = terms.get(key, ZERO) + v
        return Jet(params, self.order, terms)

    def evaluate(self, point: Sequence) -> GaussianRational:
        if len(point) != len(self.params):
            raise ParameterMismatchError("point length does not match parameters")
        vec = [gaussian(v) for v in point]
        total = ZERO
        for exp, c in self._terms.items():
            v = c
            for x, e in zip(vec, exp):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def map_coefficients(self, fn) -> "Jet":
        return Jet(self.params, self.order, {e: fn(c) for e, c in self._terms.items()})

    # rendering ----------------------------------------------------------
    def _mono(self, exp) -> str:
        parts = []
        for name, e in zip(self.params.names, exp):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def render_terms(self) -> list[tuple[int, str]]:
        """``(sign, body)`` pairs in canonical order, used by form renderers."""
        out = []
        for exp, c in self.items():
            mono = self._mono(exp)
            sign = 1
            if c.is_real() and c.re < 0:
                sign, c = -1, -c
            if not mono:
                body = str(c) if c.is_real() else f"({c})"
            elif c == ONE:
                body = mono
            elif c.is_real():
                body = f"{c}*{mono}"
            else:
                body = f"({c})*{mono}"
            out.append((sign, body))
        return out

    def __str__(self):
        pieces = self.render_terms()
        if not pieces:
            return "0"
        text = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += (" - " if sign < 0 else " + ") + body
        return text

    def __repr__(self):
        return f"Jet({self}; order={self.order})"


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_homogeneous_part(a: Jet, k: int) -> Jet:
    return a.homogeneous_part(k)


def jet_truncate(a: Jet, n: int) -> Jet:
    return a.truncate(n)


def substitute_curve(a: Jet, direction: Sequence) -> Jet:
    return a.substitute_curve(direction)


def sum_jets(jets: Iterable[Jet], params: ParamSet, order: int) -> Jet:
    total = Jet.zero(params, order)
    for j in jets:
        total = total + j
    return total
