"""Elliptic curves over Q in Weierstrass form: reduction mod primes, traces
of Frobenius by point counting, split/nonsplit multiplicative reduction, and
the Kronecker symbol used for quadratic twists."""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy


@dataclass(frozen=True)
class EllipticCurveData:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with conductor data.

    tamagawa maps ell -> c_ell (user-supplied); d_factors maps ell -> d_ell
    and defaults to 1 at primes of multiplicative reduction.
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    N: int
    tamagawa: dict = field(default_factory=dict)
    d_factors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular Weierstrass equation")

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3
              - a4 * a4)
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return (-b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6
                + 9 * b2 * b4 * b6)

    def d_factor(self, ell: int) -> int:
        return self.d_factors.get(ell, 1)


def curve_11a1(c11: int = 5) -> EllipticCurveData:
    """The conductor-11 curve (0, -1, 1, -10, -20) with its Tamagawa number."""
    return EllipticCurveData(0, -1, 1, -10, -20, 11, tamagawa={11: c11})


def count_points(curve: EllipticCurveData, ell: int) -> int:
    """#E(F_ell) including the point at infinity, by the naive double loop."""
    a1, a2, a3, a4, a6 = (curve.a1 % ell, curve.a2 % ell, curve.a3 % ell,
                          curve.a4 % ell, curve.a6 % ell)
    count = 1
    for x in range(ell):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % ell
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y) % ell == rhs:
                count += 1
    return count


def ap_naive(curve: EllipticCurveData, ell: int) -> int:
    return ell + 1 - count_points(curve, ell)


def _quadratic_character(ell: int):
    """chi(x) in {-1, 0, 1} for x mod an odd prime ell, via a residue table."""
    squares = {(x * x) % ell for x in range(1, ell)}
    return lambda x: 0 if x % ell == 0 else (1 if x % ell in squares else -1)


def ap_good(curve: EllipticCurveData, ell: int) -> int:
    """a_ell at a prime of good reduction via the quadratic-character sum."""
    if ell == 2:
        return ap_naive(curve, 2)
    b2, b4, b6, _ = curve.b_invariants
    chi = _quadratic_character(ell)
    total = 0
    for x in range(ell):
        total += chi(4 * x * x * x + b2 * x * x + 2 * b4 * x + b6)
    return -total


def _singular_point(curve: EllipticCurveData, ell: int):
    """The unique singular point of the reduction mod ell, or None."""
    a1, a2, a3, a4, a6 = (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6)
    for x in range(ell):
        for y in range(ell):
            on = (y * y + a1 * x * y + a3 * y
                  - x * x * x - a2 * x * x - a4 * x - a6) % ell == 0
            if not on:
                continue
            dx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % ell == 0
            dy = (2 * y + a1 * x + a3) % ell == 0
            if dx and dy:
                return x, y
    return None


def reduction_type(curve: EllipticCurveData, ell: int) -> str:
    """'good', 'split', 'nonsplit', or 'additive' at the odd prime ell."""
    if curve.discriminant % ell:
        return "good"
    sing = _singular_point(curve, ell)
    if sing is None:
        raise ArithmeticError("discriminant vanishes but no singular point")
    x0, _ = sing
    # translate the node to the origin; the tangent-cone slopes m satisfy
    # m^2 + a1 m - (a2 + 3 x0) = 0, so the node is split over F_ell exactly
    # when the discriminant a1^2 + 4 a2 + 12 x0 is a nonzero square
    disc = (curve.a1 ** 2 + 4 * curve.a2 + 12 * x0) % ell
    if disc == 0:
        return "additive"
    chi = _quadratic_character(ell)
    return "split" if chi(disc) == 1 else "nonsplit"


def ap(curve: EllipticCurveData, ell: int) -> int:
    """T_ell-eigenvalue of the curve: point counts at good primes, the
    split/nonsplit sign at the multiplicative prime ell = N."""
    if not sympy.isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if curve.N % ell:
        return ap_good(curve, ell)
    kind = reduction_type(curve, ell)
    if kind == "split":
        return 1
    if kind == "nonsplit":
        return -1
    raise ValueError(f"additive reduction at {ell} is out of scope")


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D|n), extending the Jacobi symbol."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if D < 0:
            sign = -sign
    v2 = 0
    while n % 2 == 0:
        n //= 2
        v2 += 1
    if v2:
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            sign *= (-1) ** v2
    return sign * int(sympy.jacobi_symbol(D % n if n > 1 else 0, n)) if n > 1 \
        else sign


def is_inert(D: int, q: int) -> bool:
    """True when the odd prime q is inert in the field of discriminant D."""
    return kronecker(D, q) == -1
