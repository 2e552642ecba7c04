"""Fixed-precision p-adic scalars, Hensel lifting, and Newton polygons.

A nonzero scalar is stored as ``unit * p**valuation`` where ``unit`` is a
residue coprime to p known modulo ``p**prec``; the represented coset is
``unit * p**valuation + O(p**(valuation + prec))``.  Exact zero is kept
distinct from "zero to every digit we know": the latter remembers only a
lower bound on its valuation.  Rank decisions elsewhere in the package
treat an entry as zero only if it is exact zero or its guaranteed
vanishing order clears the working precision minus ``ZERO_MARGIN``;
anything in between is an ambiguity and raises ``PrecisionExhausted``
rather than guessing.

Scalars are immutable after construction and all operations are pure, so
values may be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DivisionByZero,
    NonSimpleRoot,
    PrecisionExhausted,
    ZeroPolynomial,
)

# Exact scalar type for rational matrix entries and polynomial coefficients.
Rational = Fraction

# Digits of slack below the working precision before an unresolved zero is
# trusted to really be zero.
ZERO_MARGIN = 8

# Witness set making Miller-Rabin deterministic for n < 3.3 * 10**24,
# far beyond any prime usable here.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed witnesses)."""
    if n < 2:
        return False
    for sp in _MR_WITNESSES:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def padic_valuation(n: int, p: int) -> int:
    """v_p of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is undefined; handle it upstream")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def fraction_valuation(x: Fraction, p: int) -> int | float:
    """v_p extended to rationals; +inf for zero."""
    if x == 0:
        return math.inf
    return padic_valuation(x.numerator, p) - padic_valuation(x.denominator, p)


def modular_inverse(a: int, m: int) -> int:
    return pow(a, -1, m)


@dataclass(frozen=True)
class PadicContext:
    """The arithmetic world: prime p, exponent f with q = p**f, precision N.

    ``precision`` is the number of significant p-adic digits carried by
    scalars created from exact data.  Realization constructors store
    internally computed p-adic data (Hensel roots, eigenlines) with
    ``2 * precision`` digits so that structural answers can be re-derived
    at doubled precision and compared.
    """

    p: int
    f: int = 1
    precision: int = 40

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.f < 1:
            raise ValueError(f"f = {self.f} must be >= 1")
        if self.precision < 4:
            raise ValueError(f"precision {self.precision} must be >= 4")

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def threshold(self) -> int:
        """Vanishing order beyond which an entry counts as zero."""
        return self.precision - ZERO_MARGIN

    def with_precision(self, n: int) -> PadicContext:
        return PadicContext(self.p, self.f, n)

    def doubled(self) -> PadicContext:
        return self.with_precision(2 * self.precision)

    @classmethod
    def from_q(cls, q: int, precision: int = 40) -> PadicContext:
        """Context from a prime power, factoring q = p**f."""
        if q < 2:
            raise ValueError(f"q = {q} is not a prime power")
        p = 2
        while p * p <= q and q % p != 0:
            p += 1
        if q % p != 0:
            p = q
        f = 0
        m = q
        while m % p == 0:
            m //= p
            f += 1
        if m != 1:
            raise ValueError(f"q = {q} is not a prime power")
        return cls(p, f, precision)


class PadicScalar:
    """One element of Q_p known to finitely many digits.

    Three states:

    * exact zero:       ``v is None``;
    * resolved scalar:  ``v`` is the exact valuation and ``unit`` is
      coprime to p, known modulo ``p**prec`` with ``prec >= 1``;
    * unresolved zero:  ``prec == 0``; all that is known is that the
      valuation is at least ``v``.
    """

    __slots__ = ("p", "v", "unit", "prec")

    def __init__(self, p: int, v: int | None, unit: int, prec: int):
        self.p = p
        self.v = v
        self.unit = unit
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact_zero(cls, p: int) -> PadicScalar:
        return cls(p, None, 0, 0)

    @classmethod
    def unresolved_zero(cls, p: int, bound: int) -> PadicScalar:
        return cls(p, bound, 0, 0)

    @classmethod
    def one(cls, p: int, prec: int) -> PadicScalar:
        return cls(p, 0, 1, prec)

    @classmethod
    def from_residue(cls, p: int, value: int, abs_prec: int, shift: int = 0) -> PadicScalar:
        """Scalar from an integer known modulo p**abs_prec, times p**shift."""
        if abs_prec <= 0:
            return cls.unresolved_zero(p, shift + max(abs_prec, 0))
        value %= p**abs_prec
        if value == 0:
            return cls.unresolved_zero(p, abs_prec + shift)
        w = 0
        while value % p == 0:
            value //= p
            w += 1
        return cls(p, w + shift, value % p ** (abs_prec - w), abs_prec - w)

    # -- state predicates --------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.v is None

    @property
    def is_resolved(self) -> bool:
        """True when the valuation is exact and at least one digit is known."""
        return self.v is not None and self.prec >= 1

    @property
    def is_unresolved(self) -> bool:
        return self.v is not None and self.prec == 0

    @property
    def min_valuation(self) -> int | float:
        """Guaranteed lower bound on the valuation (+inf for exact zero)."""
        return math.inf if self.v is None else self.v

    def negligible(self, threshold: int) -> bool:
        """Zero for rank purposes.

        Exact zero, or an unresolved zero whose guaranteed vanishing order
        clears the threshold.  A resolved scalar is never negligible: its
        valuation is exact, so it is certainly nonzero.
        """
        return self.v is None or (self.prec == 0 and self.v >= threshold)

    def ambiguous(self, threshold: int) -> bool:
        """Unresolved zero whose bound does not clear the threshold."""
        return self.is_unresolved and self.v < threshold

    def truncate(self, digits: int) -> PadicScalar:
        """Forget digits beyond the given relative precision."""
        if not self.is_resolved or digits >= self.prec:
            return self
        if digits < 1:
            raise ValueError("cannot truncate a resolved scalar below one digit")
        return PadicScalar(self.p, self.v, self.unit % self.p**digits, digits)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: PadicScalar) -> None:
        if not isinstance(other, PadicScalar):
            raise TypeError(f"expected PadicScalar, got {type(other).__name__}")
        if self.p != other.p:
            raise ValueError(f"mixed primes {self.p} and {other.p}")

    def __neg__(self) -> PadicScalar:
        if not self.is_resolved:
            return self
        return PadicScalar(self.p, self.v, (-self.unit) % self.p**self.prec, self.prec)

    def __add__(self, other: PadicScalar) -> PadicScalar:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        self._check(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        p = self.p
        bound = min(self.v + self.prec, other.v + other.prec)
        base = min(self.v, other.v)
        width = bound - base
        if width <= 0:
            return PadicScalar.unresolved_zero(p, bound)
        mod = p**width
        s = (self.unit * p ** (self.v - base) + other.unit * p ** (other.v - base)) % mod
        return PadicScalar.from_residue(p, s, width, shift=base)

    def __sub__(self, other: PadicScalar) -> PadicScalar:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return self.__add__(-other)

    def __mul__(self, other: PadicScalar) -> PadicScalar:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        self._check(other)
        if self.is_exact_zero or other.is_exact_zero:
            return PadicScalar.exact_zero(self.p)
        prec = min(self.prec, other.prec)
        if prec == 0:
            return PadicScalar.unresolved_zero(self.p, self.v + other.v)
        unit = self.unit * other.unit % self.p**prec
        return PadicScalar(self.p, self.v + other.v, unit, prec)

    def __truediv__(self, other: PadicScalar) -> PadicScalar:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        self._check(other)
        if other.is_exact_zero:
            raise DivisionByZero("division by exact p-adic zero")
        if other.is_unresolved:
            raise PrecisionExhausted(
                f"divisor is zero to the known precision O({other.p}^{other.v})"
            )
        if self.is_exact_zero:
            return self
        if self.is_unresolved:
            return PadicScalar.unresolved_zero(self.p, self.v - other.v)
        prec = min(self.prec, other.prec)
        mod = self.p**prec
        unit = self.unit * modular_inverse(other.unit, mod) % mod
        return PadicScalar(self.p, self.v - other.v, unit, prec)

    # -- comparison and display --------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return (self.p, self.v, self.unit, self.prec) == (
            other.p,
            other.v,
            other.unit,
            other.prec,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.v, self.unit, self.prec))

    def __repr__(self) -> str:
        if self.is_exact_zero:
            return "0"
        if self.is_unresolved:
            return f"O({self.p}^{self.v})"
        return f"{self.unit}*{self.p}^{self.v} + O({self.p}^{self.v + self.prec})"


# -- scalar construction and the four operations ----------------------------


def from_rational(x: Fraction | int, ctx: PadicContext) -> PadicScalar:
    """Image of an exact rational in Q_p to ``ctx.precision`` digits."""
    x = Fraction(x)
    if x == 0:
        return PadicScalar.exact_zero(ctx.p)
    p, digits = ctx.p, ctx.precision
    vn = padic_valuation(x.numerator, p)
    vd = padic_valuation(x.denominator, p)
    mod = p**digits
    num = x.numerator // p**vn
    den = x.denominator // p**vd
    unit = num * modular_inverse(den, mod) % mod
    return PadicScalar(p, vn - vd, unit, digits)


def arith(op: str, a: PadicScalar, b: PadicScalar, ctx: PadicContext) -> PadicScalar:
    """Dispatch one of add/sub/mul/div; precision propagates pessimistically."""
    if a.p != ctx.p or b.p != ctx.p:
        raise ValueError("operands do not belong to the given context")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# -- polynomial utilities ----------------------------------------------------
# Polynomials are ascending coefficient lists: [a0, a1, ..., an].


def poly_degree(coeffs: list) -> int:
    d = len(coeffs) - 1
    while d >= 0 and coeffs[d] == 0:
        d -= 1
    return d


def poly_derivative(coeffs: list) -> list:
    return [i * c for i, c in enumerate(coeffs)][1:]


def poly_eval_mod(coeffs: list, x: int, mod: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def hensel_lift_root(poly: list, r0: int, ctx: PadicContext) -> PadicScalar:
    """Lift a simple root of a monic integer polynomial to ``ctx.precision`` digits.

    Newton iteration ``r <- r - poly(r)/poly'(r)`` with doubling modulus.
    The result satisfies ``poly(r) = 0 mod p**N`` and ``r = r0 mod p``.
    Raises ``NonSimpleRoot`` when the derivative vanishes at r0 modulo p.
    """
    p, target = ctx.p, ctx.precision
    coeffs = []
    for c in poly:
        c = Fraction(c)
        if c.denominator != 1:
            raise ValueError("integer coefficients required")
        coeffs.append(int(c))
    deg = poly_degree(coeffs)
    if deg < 1 or coeffs[deg] != 1:
        raise ValueError("monic polynomial of degree >= 1 required")
    coeffs = coeffs[: deg + 1]
    deriv = poly_derivative(coeffs)
    r = r0 % p
    if poly_eval_mod(coeffs, r, p) != 0:
        raise ValueError(f"{r0} is not a root modulo {p}")
    if poly_eval_mod(deriv, r, p) == 0:
        raise NonSimpleRoot(f"derivative vanishes at {r0} modulo {p}")
    k = 1
    while k < target:
        k = min(2 * k, target)
        mod = p**k
        fr = poly_eval_mod(coeffs, r, mod)
        dr = poly_eval_mod(deriv, r, mod)
        r = (r - fr * modular_inverse(dr, mod)) % mod
    return PadicScalar.from_residue(p, r, target)


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Lower convex hull of points sorted by abscissa (monotone chain)."""
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # pop the middle point unless it makes a strict left turn
            if (x1 - x0) * (pt[1] - y0) - (y1 - y0) * (pt[0] - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_slopes(poly: list, ctx: PadicContext) -> list:
    """Root valuations with multiplicity, normalized by f, sorted ascending.

    Computed from the lower convex hull of ``(i, v_p(a_i))``.  A zero
    constant coefficient contributes roots of infinite slope.  When the
    leading coefficient is a p-unit the slopes sum to ``v_p(a_0)/f``.
    """
    coeffs = [Fraction(c) for c in poly]
    deg = poly_degree(coeffs)
    if deg < 0:
        raise ZeroPolynomial("newton_slopes of the zero polynomial")
    points = [(i, Fraction(fraction_valuation(coeffs[i], ctx.p))) for i in range(deg + 1) if coeffs[i] != 0]
    slopes: list = [math.inf] * points[0][0]
    hull = _lower_hull(points)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        val = Fraction(y0 - y1, x1 - x0)  # common valuation of the segment's roots
        slopes.extend([val / ctx.f] * (x1 - x0))
    return sorted(slopes)


# -- square roots in Q_p -----------------------------------------------------


def _unit_sqrt(u: int, p: int, digits: int) -> int:
    """Square root of a unit modulo p**digits; the caller guarantees one exists."""
    if p != 2:
        r0 = next(r for r in range(1, p) if (r * r - u) % p == 0)
        r0 = min(r0, p - r0)
        ctx = PadicContext(p, 1, max(digits, 4))
        return hensel_lift_root([-u, 0, 1], r0, ctx).unit % p**digits
    # p = 2: u = 1 mod 8; fix one bit of the root per step
    s = 1
    for k in range(3, digits):
        if (s * s - u) % (1 << (k + 1)):
            s += 1 << (k - 1)
    return s % (1 << digits)


def integer_square_root(d: int, p: int, digits: int) -> PadicScalar | None:
    """A square root of a nonzero integer in Q_p, or None when d is not a square.

    d is a square in Q_p iff its valuation is even and its unit part is a
    square modulo p (modulo 8 when p = 2).
    """
    if d == 0:
        raise ValueError("use exact zero directly")
    v = padic_valuation(d, p)
    if v % 2 != 0:
        return None
    u = d // p**v
    if p == 2:
        if u % 8 != 1:
            return None
    else:
        if pow(u % p, (p - 1) // 2, p) != 1:
            return None
    root = _unit_sqrt(u % p**digits, p, digits)
    return PadicScalar(p, v // 2, root, digits)


# -- serialization -----------------------------------------------------------


def scalar_to_jsonable(s: PadicScalar) -> dict:
    """Object form: {"v": int | "inf", "unit": decimal string, "prec": int}."""
    return {
        "v": "inf" if s.is_exact_zero else s.v,
        "unit": str(s.unit),
        "prec": s.prec,
    }


def scalar_from_jsonable(obj: dict, ctx: PadicContext) -> PadicScalar:
    if obj["v"] == "inf":
        return PadicScalar.exact_zero(ctx.p)
    return PadicScalar(ctx.p, int(obj["v"]), int(obj["unit"]), int(obj.get("prec", ctx.precision)))


def rational_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)
