"""
Exact arithmetic in Q and in real number fields Q(theta).

A NumberField is presented by a monic irreducible integer polynomial and a
rational interval isolating one real root theta. Elements are rational
coordinate vectors in the power basis 1, theta, ..., theta^(d-1). Signs,
floors and decimal enclosures are certified by bisecting theta's interval;
no floating point is used anywhere.
"""

import re
import math
import logging
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, Symbol, factorint
from sympy.polys.polyerrors import NotInvertible

from .exceptions import FieldError

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 4

_X = Symbol('x')

Rationalish = Union[int, Fraction, str]


def as_fraction(value) -> Fraction:
    """Coerce int, Fraction, "p/q" text or a sympy Rational into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise FieldError(f"Not a rational value: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise FieldError(f"Not a rational value: {value!r}")
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    raise FieldError(f"Not a rational value: {value!r}")


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _eval_poly(coeffs: Sequence[int], x: Fraction) -> Fraction:
    """Horner evaluation, coefficients highest degree first."""
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def format_decimal(value: Fraction, digits: int, round_up: bool) -> str:
    """Decimal text of value rounded down (or up) at the given number of digits."""
    scale = 10 ** digits
    n = value.numerator * scale
    d = value.denominator
    q = -((-n) // d) if round_up else n // d
    sign = '-' if q < 0 else ''
    whole, frac = divmod(abs(q), scale)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def _dyadic_midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    """A dyadic rational strictly inside (lo, hi), within a quarter width of the middle."""
    width = hi - lo
    k = max(0, width.denominator.bit_length() - width.numerator.bit_length() + 3)
    mid = (lo + hi) / 2
    scaled = mid * (1 << k)
    return Fraction(scaled.numerator // scaled.denominator, 1 << k)


@dataclass(frozen=True)
class IntervalReal:
    """Closed rational interval [lo, hi] enclosing a real number."""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise FieldError(f"Empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value) -> "IntervalReal":
        v = as_fraction(value)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value) -> bool:
        v = as_fraction(value)
        return self.lo <= v <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def __add__(self, other) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            return IntervalReal(self.lo + other.lo, self.hi + other.hi)
        v = as_fraction(other)
        return IntervalReal(self.lo + v, self.hi + v)

    __radd__ = __add__

    def __neg__(self) -> "IntervalReal":
        return IntervalReal(-self.hi, -self.lo)

    def __sub__(self, other) -> "IntervalReal":
        return self + (-other if isinstance(other, IntervalReal) else -as_fraction(other))

    def __mul__(self, other) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            products = (self.lo * other.lo, self.lo * other.hi,
                        self.hi * other.lo, self.hi * other.hi)
            return IntervalReal(min(products), max(products))
        v = as_fraction(other)
        if v >= 0:
            return IntervalReal(self.lo * v, self.hi * v)
        return IntervalReal(self.hi * v, self.lo * v)

    __rmul__ = __mul__

    def __abs__(self) -> "IntervalReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return IntervalReal(Fraction(0), max(-self.lo, self.hi))

    @staticmethod
    def maximum(intervals: Iterable["IntervalReal"]) -> "IntervalReal":
        """Enclosure of the maximum of the enclosed numbers."""
        items = list(intervals)
        if not items:
            raise FieldError("maximum of an empty interval list")
        return IntervalReal(max(i.lo for i in items), max(i.hi for i in items))

    def to_str(self, digits: int = 30) -> str:
        lo = format_decimal(self.lo, digits, round_up=False)
        hi = format_decimal(self.hi, digits, round_up=True)
        return f"interval:[{lo},{hi}]"


class NumberField:
    """
    Real number field Q(theta) with theta the unique root of `minpoly`
    inside `root_interval`. Degree-1 fields all represent Q.
    """

    def __init__(self, minpoly: Sequence[int], root_interval: Tuple[Rationalish, Rationalish],
                 check_irreducible: bool = True, max_degree: int = DEFAULT_MAX_DEGREE):
        coeffs = [int(c) for c in minpoly]
        while coeffs and coeffs[0] == 0:
            coeffs = coeffs[1:]
        if len(coeffs) < 2:
            raise FieldError("Minimal polynomial must have degree at least 1")
        if coeffs[0] != 1:
            raise FieldError(f"Minimal polynomial {coeffs} is not monic")
        degree = len(coeffs) - 1
        if degree > max_degree:
            raise FieldError(f"Field degree {degree} exceeds the configured bound {max_degree}")

        lo, hi = as_fraction(root_interval[0]), as_fraction(root_interval[1])
        if lo >= hi:
            raise FieldError(f"Root interval [{lo}, {hi}] is empty or degenerate")

        poly = Poly(coeffs, _X)
        if degree > 1:
            if check_irreducible and not poly.is_irreducible:
                raise FieldError(f"Polynomial {poly.as_expr()} is reducible over Q")
            if not poly.is_sqf:
                raise FieldError(f"Polynomial {poly.as_expr()} is not squarefree")

        s_lo, s_hi = _sign(_eval_poly(coeffs, lo)), _sign(_eval_poly(coeffs, hi))
        if s_lo * s_hi >= 0:
            raise FieldError(f"No sign change of {poly.as_expr()} on [{lo}, {hi}]")
        if degree > 1 and poly.count_roots(_to_sympy(lo), _to_sympy(hi)) != 1:
            raise FieldError(f"[{lo}, {hi}] does not isolate a single root of {poly.as_expr()}")

        self.minpoly: Tuple[int, ...] = tuple(coeffs)
        self.degree: int = degree
        self.root_interval: Tuple[Fraction, Fraction] = (lo, hi)
        # x^d = sum reduction[i] x^i
        self._reduction = tuple(Fraction(-c) for c in reversed(coeffs[1:]))
        self._sign_lo = s_lo
        self._best = (lo, hi)
        self._refined = {}
        self.root_index = 0 if degree == 1 else int(poly.count_roots(None, _to_sympy(lo)))
        self._sqrt_form = None

    def __repr__(self):
        return f"NumberField(minpoly={list(self.minpoly)}, root_interval=[{self.root_interval[0]}, {self.root_interval[1]}])"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        if self.degree == 1 and other.degree == 1:
            return True
        return self.minpoly == other.minpoly and self.root_index == other.root_index

    def __hash__(self):
        if self.degree == 1:
            return hash(("Q",))
        return hash((self.minpoly, self.root_index))

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    # Construction helpers

    def element(self, coords: Sequence[Rationalish]) -> "FieldElement":
        return FieldElement(coords, self)

    def from_rational(self, value: Rationalish) -> "FieldElement":
        return FieldElement._make((as_fraction(value),) + (Fraction(0),) * (self.degree - 1), self)

    def zero(self) -> "FieldElement":
        return self.from_rational(0)

    def one(self) -> "FieldElement":
        return self.from_rational(1)

    def theta(self) -> "FieldElement":
        if self.degree == 1:
            return self.from_rational(-self.minpoly[1])
        return FieldElement._make((Fraction(0), Fraction(1)) + (Fraction(0),) * (self.degree - 2), self)

    # Certified refinement of theta

    def theta_interval(self, bits: int) -> Tuple[Fraction, Fraction]:
        """Enclosure of theta of width at most 2**-bits, by bisection."""
        if self.degree == 1:
            r = Fraction(-self.minpoly[1])
            return r, r
        cached = self._refined.get(bits)
        if cached is not None:
            return cached
        lo, hi = self._best
        target = Fraction(1, 1 << bits)
        while hi - lo > target:
            mid = _dyadic_midpoint(lo, hi)
            s_mid = _sign(_eval_poly(self.minpoly, mid))
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == self._sign_lo:
                lo = mid
            else:
                hi = mid
        if hi - lo < self._best[1] - self._best[0]:
            self._best = (lo, hi)
        self._refined[bits] = (lo, hi)
        return lo, hi

    def evaluate(self, coords: Sequence[Fraction], bits: int) -> IntervalReal:
        """Interval Horner evaluation of sum coords[i] theta^i at theta precision `bits`."""
        lo, hi = self.theta_interval(bits)
        if self.degree == 1:
            return IntervalReal.point(coords[0])
        theta = IntervalReal(lo, hi)
        acc = IntervalReal.point(coords[-1])
        for c in reversed(coords[:-1]):
            acc = acc * theta + c
        return acc

    # Quadratic presentation theta = (-p + eps*s*sqrt(D)) / 2

    def sqrt_form(self) -> Tuple[int, int, int, int]:
        """(p, s, D, eps) for a quadratic field; D is squarefree."""
        if self.degree != 2:
            raise FieldError("sqrt form only exists for quadratic fields")
        if self._sqrt_form is None:
            _, p, q = self.minpoly
            disc = p * p - 4 * q
            s, D = 1, 1
            for prime, exp in factorint(disc).items():
                s *= int(prime) ** (exp // 2)
                D *= int(prime) ** (exp % 2)
            shifted = FieldElement._make((Fraction(p, 2), Fraction(1)), self)
            self._sqrt_form = (p, s, D, shifted.sign())
        return self._sqrt_form

    def to_json(self) -> dict:
        return {
            "minpoly": list(self.minpoly),
            "root_interval": [str(self.root_interval[0]), str(self.root_interval[1])],
        }


def field_create(minpoly: Sequence[int], root_interval: Tuple[Rationalish, Rationalish],
                 check_irreducible: bool = True,
                 max_degree: int = DEFAULT_MAX_DEGREE) -> NumberField:
    """Validate and build a NumberField (see NumberField)."""
    return NumberField(minpoly, root_interval, check_irreducible, max_degree)


RATIONALS = NumberField((1, 0), (-1, 1))


def quadratic_field(d: int) -> NumberField:
    """Q(sqrt(d)) for a positive non-square integer d."""
    r = math.isqrt(d)
    if r * r == d:
        raise FieldError(f"{d} is a perfect square")
    return NumberField((1, 0, -d), (r, r + 1))


def field_from_string(text: str, root_index: int = -1,
                      max_degree: int = DEFAULT_MAX_DEGREE,
                      check_irreducible: bool = True) -> NumberField:
    """
    Build a field from polynomial text such as "x^2-5", embedding theta as
    the real root with the given index (increasing order, default largest).
    """
    try:
        expr = sympy.sympify(text.replace('^', '**'), locals={'x': _X})
        poly = Poly(expr, _X)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
        raise FieldError(f"Cannot parse polynomial {text!r}: {e}")
    coeffs = poly.all_coeffs()
    if not all(c.is_Integer for c in coeffs):
        raise FieldError(f"Polynomial {text!r} must have integer coefficients")
    coeffs = [int(c) for c in coeffs]
    roots = poly.intervals()
    if not roots:
        raise FieldError(f"Polynomial {text!r} has no real root")
    try:
        (a, b), _ = roots[root_index]
    except IndexError:
        raise FieldError(f"Polynomial {text!r} has no real root with index {root_index}")
    lo, hi = as_fraction(a), as_fraction(b)
    if lo == hi:
        lo, hi = lo - 1, hi + 1
    return NumberField(coeffs, (lo, hi), check_irreducible, max_degree)


class FieldElement:
    """Exact element of a NumberField, immutable."""

    __slots__ = ("coords", "field")

    def __init__(self, coords: Sequence[Rationalish], field: NumberField):
        values = [as_fraction(c) for c in coords]
        if len(values) > field.degree:
            if any(values[field.degree:]):
                raise FieldError(f"{len(values)} coordinates given for a degree-{field.degree} field")
            values = values[:field.degree]
        values += [Fraction(0)] * (field.degree - len(values))
        object.__setattr__(self, "coords", tuple(values))
        object.__setattr__(self, "field", field)

    @classmethod
    def _make(cls, coords: Tuple[Fraction, ...], field: NumberField) -> "FieldElement":
        obj = object.__new__(cls)
        object.__setattr__(obj, "coords", coords)
        object.__setattr__(obj, "field", field)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coords]}, {self.field.minpoly})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            terms.append(str(c) if i == 0 else f"({c})*t" + (f"^{i}" if i > 1 else ""))
        return " + ".join(terms) if terms else "0"

    # Predicates

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self} is not rational")
        return self.coords[0]

    def is_integer(self) -> bool:
        return self.is_rational() and self.coords[0].denominator == 1

    # Arithmetic

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is self.field or other.field == self.field:
                return other
            if other.is_rational():
                return self.field.from_rational(other.coords[0])
            raise FieldError(f"Field mismatch: {self.field!r} vs {other.field!r}")
        return self.field.from_rational(as_fraction(other))

    def __add__(self, other) -> "FieldElement":
        if isinstance(other, int) and not isinstance(other, bool):
            return FieldElement._make((self.coords[0] + other,) + self.coords[1:], self.field)
        b = self._coerce(other)
        return FieldElement._make(tuple(x + y for x, y in zip(self.coords, b.coords)), self.field)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement._make(tuple(-x for x in self.coords), self.field)

    def __sub__(self, other) -> "FieldElement":
        if isinstance(other, int) and not isinstance(other, bool):
            return FieldElement._make((self.coords[0] - other,) + self.coords[1:], self.field)
        b = self._coerce(other)
        return FieldElement._make(tuple(x - y for x, y in zip(self.coords, b.coords)), self.field)

    def __rsub__(self, other) -> "FieldElement":
        return (-self) + other

    def __mul__(self, other) -> "FieldElement":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement._make(tuple(x * other for x in self.coords), self.field)
        b = self._coerce(other)
        if b.is_rational():
            s = b.coords[0]
            return FieldElement._make(tuple(x * s for x in self.coords), self.field)
        return FieldElement._make(_mul_coords(self.coords, b.coords, self.field), self.field)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise FieldError("Division by zero")
        if self.is_rational():
            return self.field.from_rational(1 / self.coords[0])
        num = Poly([_to_sympy(c) for c in reversed(self.coords)], _X, domain='QQ')
        mod = Poly(list(self.field.minpoly), _X, domain='QQ')
        try:
            inv = num.invert(mod)
        except NotInvertible:
            raise FieldError(f"{self} is not invertible modulo {self.field.minpoly}")
        values = [as_fraction(c) for c in reversed(inv.all_coeffs())]
        return FieldElement(values, self.field)

    def __truediv__(self, other) -> "FieldElement":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise FieldError("Division by zero")
            return FieldElement._make(tuple(x / other for x in self.coords), self.field)
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "FieldElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = self.field.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.field is self.field or other.field == self.field:
                return self.coords == other.coords
            return self.is_rational() and other.is_rational() and self.coords[0] == other.coords[0]
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coords[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.coords, self.field))

    # Certified real information

    def enclosure_at(self, bits: int) -> IntervalReal:
        """Enclosure from theta refined to width 2**-bits (width of result not controlled)."""
        if self.is_rational():
            return IntervalReal.point(self.coords[0])
        return self.field.evaluate(self.coords, bits)

    def enclosure(self, bits: int = 128) -> IntervalReal:
        """Enclosure of width at most 2**-bits."""
        if self.is_rational():
            return IntervalReal.point(self.coords[0])
        target = Fraction(1, 1 << bits)
        precision = bits + 16
        while True:
            enc = self.field.evaluate(self.coords, precision)
            if enc.width <= target:
                return enc
            excess = (enc.width.numerator.bit_length()
                      - enc.width.denominator.bit_length() + bits + 2)
            precision += max(8, excess)

    def sign(self) -> int:
        """Certified sign: refine theta until the enclosure excludes zero."""
        if self.is_rational():
            return _sign(self.coords[0])
        bits = 32
        while True:
            enc = self.field.evaluate(self.coords, bits)
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            bits *= 2

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self) -> "FieldElement":
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.coords[0])
        bits = 32
        while True:
            enc = self.field.evaluate(self.coords, bits)
            f_lo, f_hi = math.floor(enc.lo), math.floor(enc.hi)
            if f_lo == f_hi:
                return f_lo
            bits *= 2

    def convert(self, target: NumberField) -> "FieldElement":
        return elem_convert(self, target)

    def to_json(self) -> dict:
        data = self.field.to_json()
        data["coords"] = [str(c) for c in self.coords]
        return data


def _mul_coords(a: Tuple[Fraction, ...], b: Tuple[Fraction, ...],
                field: NumberField) -> Tuple[Fraction, ...]:
    d = field.degree
    prod = [Fraction(0)] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    red = field._reduction
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c:
            prod[k] = Fraction(0)
            for i in range(d):
                prod[k - d + i] += c * red[i]
    return tuple(prod[:d])


# Module-level operations

def elem_arith(op: str, a: FieldElement, b: FieldElement) -> FieldElement:
    """Exact add/sub/mul/div of two elements of the same field."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise FieldError(f"Unknown field operation {op!r}")


def elem_sign(a: FieldElement) -> int:
    return a.sign()


def elem_floor(a: FieldElement) -> int:
    return a.floor()


def elem_enclosure(a: FieldElement, bits: int = 128) -> IntervalReal:
    return a.enclosure(bits)


def nearest_integer_split(a: FieldElement) -> Tuple[int, FieldElement]:
    """
    Split a = z + f with z an integer and f in [-1/2, 1/2); ties round up,
    so an exact half gives f = -1/2.
    """
    z = (a + Fraction(1, 2)).floor()
    return z, a - z


def elem_convert(a: FieldElement, target: NumberField) -> FieldElement:
    """Re-express a in another presentation of the same real field."""
    if a.field is target or a.field == target:
        return FieldElement._make(a.coords, target)
    if a.is_rational():
        return target.from_rational(a.coords[0])
    if a.field.degree == 2 and target.degree == 2:
        p, s, D, eps = a.field.sqrt_form()
        p2, s2, D2, eps2 = target.sqrt_form()
        if D == D2:
            c0, c1 = a.coords
            # value = u + v*sqrt(D)
            u = c0 - c1 * Fraction(p, 2)
            v = c1 * Fraction(eps * s, 2)
            # sqrt(D) = (2*theta' + p2) / (eps2*s2)
            k = Fraction(1, eps2 * s2)
            return FieldElement._make((u + v * p2 * k, 2 * v * k), target)
    raise FieldError(f"Cannot express {a} of {a.field!r} in {target!r}")


def field_nullspace(rows: List[List[FieldElement]], field: NumberField) -> List[List[FieldElement]]:
    """Basis of the right nullspace of a matrix over the field (exact elimination)."""
    if not rows:
        return []
    ncols = len(rows[0])
    work = [[field.zero() + x for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if not work[i][c].is_zero()), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and not work[i][c].is_zero():
                factor = work[i][c]
                work[i] = [x - factor * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [field.zero() for _ in range(ncols)]
        vec[free] = field.one()
        for row, pc in enumerate(pivots):
            vec[pc] = -work[row][free]
        basis.append(vec)
    return basis


# Expression parsing

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+)?\s*$")
_SQRT_RE = re.compile(
    r"^\s*\(?\s*(?P<a>[+-]?\s*\d+)?\s*(?P<sign>[+-])?\s*(?:(?P<b>\d+)\s*\*\s*)?"
    r"sqrt\(\s*(?P<d>\d+)\s*\)\s*\)?\s*(?:/\s*(?P<c>\d+))?\s*$")
_COORDS_RE = re.compile(r"^\s*coords\s*:\s*\[(?P<coords>[^\]]*)\]\s*@\s*(?P<poly>.+)$")


def parse_element(text: str, field: Optional[NumberField] = None) -> FieldElement:
    """
    Parse `p/q`, `(a+b*sqrt(d))/c` or `coords:[c0,c1,...]@<minpoly>`.
    With `field` given, the value is converted into that field.
    """
    m = _COORDS_RE.match(text)
    if m:
        own = field_from_string(m.group("poly"))
        coords = [as_fraction(c) for c in m.group("coords").split(",") if c.strip()]
        value = FieldElement(coords, own)
        return elem_convert(value, field) if field is not None else value

    if _RATIONAL_RE.match(text):
        value = as_fraction(text.replace(" ", ""))
        return (field or RATIONALS).from_rational(value)

    m = _SQRT_RE.match(text)
    if not m:
        raise FieldError(f"Cannot parse field element {text!r}")
    if m.group("a") is not None and m.group("sign") is None:
        raise FieldError(f"Missing sign before sqrt in {text!r}")
    a = int(m.group("a").replace(" ", "")) if m.group("a") else 0
    b = int(m.group("b")) if m.group("b") else 1
    if m.group("sign") == "-":
        b = -b
    c = int(m.group("c")) if m.group("c") else 1
    d = int(m.group("d"))
    if c == 0:
        raise FieldError(f"Zero denominator in {text!r}")
    r = math.isqrt(d)
    if r * r == d:
        value = RATIONALS.from_rational(Fraction(a + b * r, c))
    else:
        value = FieldElement((Fraction(a, c), Fraction(b, c)), quadratic_field(d))
    return elem_convert(value, field) if field is not None else value


def parse_element_list(text: str, field: Optional[NumberField] = None) -> List[FieldElement]:
    """Comma separated elements; commas inside brackets or parentheses are kept."""
    items, depth, current = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(current))
            current = []
        else:
            current.append(ch)
    if "".join(current).strip():
        items.append("".join(current))
    return [parse_element(item, field) for item in items if item.strip()]


def common_field(elements: Sequence[FieldElement]) -> NumberField:
    """The field of the first irrational element (Q if all are rational)."""
    for e in elements:
        if not e.is_rational():
            return e.field
    return RATIONALS
