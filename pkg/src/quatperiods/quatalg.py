"""Definite quaternion algebras ramified exactly at one odd prime q and
infinity: maximal orders, right-ideal classes (the Shimura set) with unit
weights, Brandt matrices, and the integral Hecke eigenform attached to an
elliptic curve of conductor q.

Quaternions are row 4-vectors of Fractions over the basis 1, i, j, k with
i^2 = a, j^2 = b, k = ij = -ji. Lattices are full-rank Z-modules stored as
an integer row-Hermite basis over a common denominator, so all lattice
arithmetic (products, intersections, norms, discriminants) is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, lcm

import sympy

from .linalg import (hnf, hnf_solve, left_kernel, mat_inv_frac,
                     qf_enumerate, qf_solutions)


# ---------------------------------------------------------------------------
# the algebra

class QuaternionAlgebra:
    """B = (a, b / Q): i^2 = a, j^2 = b, ij = -ji = k."""

    def __init__(self, a: int, b: int, q: int):
        self.a = a
        self.b = b
        self.q = q

    def mult(self, x, y):
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x):
        return (x[0], -x[1], -x[2], -x[3])

    @staticmethod
    def trd(x):
        return 2 * x[0]

    def nrd(self, x):
        x0, x1, x2, x3 = x
        return x0 * x0 - self.a * x1 * x1 - self.b * x2 * x2 \
            + self.a * self.b * x3 * x3

    def nrd_bilinear(self, x, y):
        """trd(x * conj(y)) = nrd(x+y) - nrd(x) - nrd(y)."""
        return self.trd(self.mult(x, self.conj(y)))

    def right_mult_matrix(self, y):
        """Matrix R with x*y = x.R for row vectors x."""
        basis = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
        return [list(self.mult(e, y)) for e in basis]

    def ramified_primes(self):
        """Finite ramified primes, by Hilbert symbols at 2 and odd p | 2ab."""
        ps = {2}
        for n in (self.a, self.b):
            ps.update(sympy.factorint(abs(n)))
        return sorted(p for p in ps if hilbert_symbol(self.a, self.b, p) == -1)

    def is_definite(self):
        return self.a < 0 and self.b < 0


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """(a, b)_p for a prime p (use p = -1 for the real place)."""
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    alpha, beta = _vp(a, p), _vp(b, p)
    u, v = a // p ** alpha, b // p ** beta
    if p != 2:
        leg_u = int(sympy.jacobi_symbol(u % p, p))
        leg_v = int(sympy.jacobi_symbol(v % p, p))
        sign = 1
        if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
            sign = -sign
        if beta % 2:
            sign *= leg_u
        if alpha % 2:
            sign *= leg_v
        return sign
    eps_u, eps_v = (u - 1) // 2, (v - 1) // 2
    om_u, om_v = (u * u - 1) // 8, (v * v - 1) // 8
    e = eps_u * eps_v + alpha * om_v + beta * om_u
    return -1 if e % 2 else 1


def build_algebra(q: int) -> QuaternionAlgebra:
    """The definite quaternion algebra over Q ramified exactly at {q, oo}."""
    if q == 2 or not sympy.isprime(q):
        raise ValueError("q must be an odd prime")
    if q % 4 == 3:
        a = -1
    elif q % 8 == 5:
        a = -2
    else:
        r = 3
        while not (r % 4 == 3 and sympy.isprime(r)
                   and sympy.jacobi_symbol(r, q) == -1):
            r = sympy.nextprime(r)
        a = -r
    alg = QuaternionAlgebra(a, -q, q)
    if alg.ramified_primes() != [q] or not alg.is_definite():
        raise ArithmeticError("ramification certificate failed")
    return alg


# ---------------------------------------------------------------------------
# lattices

def _frac_gcd(values) -> Fraction:
    num, den = 0, 1
    for v in values:
        v = Fraction(v)
        num = gcd(num * v.denominator, v.numerator * den)
        den = den * v.denominator // gcd(den, v.denominator)
        g = gcd(num, den)
        num, den = num // g, den // g
    return Fraction(num, den)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice in B: rows/den with rows an integer Hermite basis."""

    rows: tuple
    den: int

    @staticmethod
    def make(int_rows, den: int) -> "Lattice":
        basis = hnf(int_rows)
        if len(basis) != 4:
            raise ValueError("lattice is not full rank")
        g = den
        for r in basis:
            for x in r:
                g = gcd(g, x)
        return Lattice(tuple(tuple(x // g for x in r) for r in basis), den // g)

    @staticmethod
    def from_vectors(vecs) -> "Lattice":
        den = 1
        for v in vecs:
            for x in v:
                den = lcm(den, Fraction(x).denominator)
        rows = [[int(Fraction(x) * den) for x in v] for v in vecs]
        return Lattice.make(rows, den)

    def vectors(self):
        return [tuple(Fraction(x, self.den) for x in r) for r in self.rows]

    def contains(self, vec) -> bool:
        scaled = [Fraction(x) * self.den for x in vec]
        if any(f.denominator != 1 for f in scaled):
            return False
        return hnf_solve([list(r) for r in self.rows],
                         [int(f) for f in scaled]) is not None

    def coordinates(self, vec):
        scaled = [Fraction(x) * self.den for x in vec]
        if any(f.denominator != 1 for f in scaled):
            return None
        return hnf_solve([list(r) for r in self.rows],
                         [int(f) for f in scaled])

    def scale(self, c) -> "Lattice":
        c = Fraction(c)
        return Lattice.from_vectors(
            [[x * c for x in v] for v in self.vectors()])

    def product(self, other: "Lattice", alg: QuaternionAlgebra) -> "Lattice":
        vecs = [alg.mult(u, v)
                for u in self.vectors() for v in other.vectors()]
        return Lattice.from_vectors(vecs)

    def conjugate(self) -> "Lattice":
        return Lattice.from_vectors(
            [QuaternionAlgebra.conj(v) for v in self.vectors()])

    def gram(self, alg: QuaternionAlgebra):
        """G with nrd(sum c_i b_i) = c G c^T (Fraction entries)."""
        vs = self.vectors()
        return [[Fraction(alg.nrd_bilinear(u, v), 2) for v in vs] for u in vs]

    def norm(self, alg: QuaternionAlgebra) -> Fraction:
        """The reduced norm of the lattice: content of its norm form."""
        G = self.gram(alg)
        vals = [G[i][i] for i in range(4)]
        vals += [2 * G[i][j] for i in range(4) for j in range(i + 1, 4)]
        return _frac_gcd(vals)

    def reduced_discriminant(self, alg: QuaternionAlgebra) -> int:
        vs = self.vectors()
        M = [[alg.trd(alg.mult(u, v)) for v in vs] for u in vs]
        d = _det4(M)
        num = abs(d.numerator)
        if d.denominator != 1:
            raise ArithmeticError("non-integral trace form")
        r = isqrt(num)
        if r * r != num:
            raise ArithmeticError("trace-form determinant is not a square")
        return r


def _det4(M):
    import itertools
    total = Fraction(0)
    for perm in itertools.permutations(range(4)):
        sign = 1
        p = list(perm)
        for i in range(4):
            for j in range(i + 1, 4):
                if p[i] > p[j]:
                    sign = -sign
        term = Fraction(1)
        for i in range(4):
            term *= Fraction(M[i][perm[i]])
        total += sign * term
    return total


def lattice_intersection(A: Lattice, B: Lattice) -> Lattice:
    D = lcm(A.den, B.den)
    ar = [[x * (D // A.den) for x in r] for r in A.rows]
    br = [[x * (D // B.den) for x in r] for r in B.rows]
    stacked = ar + [[-x for x in r] for r in br]
    out = []
    for k in left_kernel(stacked):
        u = k[:4]
        vec = [sum(u[t] * ar[t][c] for t in range(4)) for c in range(4)]
        out.append(vec)
    return Lattice.make(out, D)


# ---------------------------------------------------------------------------
# orders

def standard_order(alg: QuaternionAlgebra) -> Lattice:
    return Lattice.make([[1, 0, 0, 0], [0, 1, 0, 0],
                         [0, 0, 1, 0], [0, 0, 0, 1]], 1)


def is_order(L: Lattice, alg: QuaternionAlgebra) -> bool:
    if not L.contains((1, 0, 0, 0)):
        return False
    vs = L.vectors()
    for u in vs:
        t, n = alg.trd(u), alg.nrd(u)
        if Fraction(t).denominator != 1 or Fraction(n).denominator != 1:
            return False
    return all(L.contains(alg.mult(u, v)) for u in vs for v in vs)


def maximal_order(alg: QuaternionAlgebra) -> Lattice:
    """Saturate the standard order until the reduced discriminant equals q."""
    O = standard_order(alg)
    for _ in range(64):
        d = O.reduced_discriminant(alg)
        if d == alg.q:
            return O
        if d % alg.q:
            raise ArithmeticError("discriminant lost the ramified prime")
        f = d // alg.q
        r = min(sympy.factorint(f))
        O2 = _saturate_at(O, alg, r)
        if O2 is None:
            raise ArithmeticError(f"cannot enlarge order at {r}")
        O = O2
    raise ArithmeticError("saturation did not terminate")


def _saturate_at(O: Lattice, alg: QuaternionAlgebra, r: int):
    vs = O.vectors()
    for c0 in range(r):
        for c1 in range(r):
            for c2 in range(r):
                for c3 in range(r):
                    if not (c0 or c1 or c2 or c3):
                        continue
                    x = tuple(
                        Fraction(c0 * vs[0][t] + c1 * vs[1][t]
                                 + c2 * vs[2][t] + c3 * vs[3][t], r)
                        for t in range(4))
                    if O.contains(x):
                        continue
                    if Fraction(alg.trd(x)).denominator != 1:
                        continue
                    if Fraction(alg.nrd(x)).denominator != 1:
                        continue
                    cand = Lattice.from_vectors(vs + [list(x)])
                    if is_order(cand, alg):
                        return cand
    return None


def left_order(L: Lattice, alg: QuaternionAlgebra) -> Lattice:
    """{x in B : x L is contained in L}."""
    acc = None
    for y in L.vectors():
        n = alg.nrd(y)
        yinv = tuple(Fraction(c, 1) / n for c in alg.conj(y))
        R = alg.right_mult_matrix(yinv)
        vecs = [[sum(Fraction(v[t]) * R[t][c] for t in range(4))
                 for c in range(4)] for v in L.vectors()]
        cand = Lattice.from_vectors(vecs)
        acc = cand if acc is None else lattice_intersection(acc, cand)
    return acc


def unit_count(O: Lattice, alg: QuaternionAlgebra) -> int:
    """Number of units (reduced-norm-1 elements) of the order O."""
    sols = qf_solutions(O.gram(alg), 1)
    return len([s for s in sols if any(s)])


# ---------------------------------------------------------------------------
# right ideal classes

@dataclass
class ShimuraSet:
    alg: QuaternionAlgebra
    order: Lattice
    classes: list
    weights: list
    left_orders: list = field(repr=False, default_factory=list)

    @property
    def H(self) -> int:
        return len(self.classes)

    def mass(self) -> Fraction:
        return sum((Fraction(1, 2 * w) for w in self.weights), Fraction(0))

    def classify(self, I: Lattice) -> int:
        for idx, J in enumerate(self.classes):
            if is_isomorphic(I, J, self.alg):
                return idx
        raise ArithmeticError("ideal matches no class representative")


def is_isomorphic(I: Lattice, J: Lattice, alg: QuaternionAlgebra) -> bool:
    """Same right-ideal class iff I * conj(J) represents nrd(I) * nrd(J)."""
    P = I.product(J.conjugate(), alg)
    target = I.norm(alg) * J.norm(alg)
    sols = qf_solutions(P.gram(alg), target)
    return any(any(s) for s in sols)


def _two_neighbors(I: Lattice, O: Lattice, alg: QuaternionAlgebra):
    """The three right-O-ideals J with 2I < J-compatible index-4 sublattices.

    Works in I/2I (an F_2^4 with a right O-action); stable 2-dimensional
    subspaces correspond to the 2+1 neighbors.
    """
    Binv = mat_inv_frac([list(r) for r in I.rows])
    mats = []
    for y in O.vectors():
        R = alg.right_mult_matrix(y)
        # action on I-coordinates: M = B R B^{-1} (den cancels)
        M = [[sum(Fraction(I.rows[s][t]) * R[t][u] * Binv[u][c]
                  for t in range(4) for u in range(4)) for c in range(4)]
             for s in range(4)]
        Mint = []
        for row in M:
            assert all(f.denominator == 1 for f in row)
            Mint.append([int(f) % 2 for f in row])
        mats.append(Mint)

    def mulvec(v, M):
        return tuple(sum(v[t] * M[t][c] for t in range(4)) % 2
                     for c in range(4))

    # all 2-dimensional subspaces of F_2^4, as canonical reduced bases
    vectors = [tuple((n >> t) & 1 for t in range(4)) for n in range(1, 16)]
    seen = set()
    subspaces = []
    for a in vectors:
        for b in vectors:
            if a == b:
                continue
            span = {(0, 0, 0, 0), a, b,
                    tuple((x + y) % 2 for x, y in zip(a, b))}
            key = frozenset(span)
            if len(span) == 4 and key not in seen:
                seen.add(key)
                subspaces.append((a, b))
    out = []
    for a, b in subspaces:
        stable = all(mulvec(v, M) in
                     {(0, 0, 0, 0), a, b,
                      tuple((x + y) % 2 for x, y in zip(a, b))}
                     for v in (a, b) for M in mats)
        if not stable:
            continue
        lift = []
        for w in (a, b):
            lift.append([sum(w[t] * I.rows[t][c] for t in range(4))
                         for c in range(4)])
        lift += [[2 * x for x in r] for r in I.rows]
        out.append(Lattice.make(lift, I.den))
    if len(out) != 3:
        raise ArithmeticError(f"expected 3 two-neighbors, found {len(out)}")
    return out


def right_ideal_classes(O: Lattice, alg: QuaternionAlgebra) -> ShimuraSet:
    """Close the principal class under 2-neighbors until the Eichler mass
    (q-1)/24 is reached exactly."""
    target = Fraction(alg.q - 1, 24)
    X = ShimuraSet(alg, O, [O], [unit_count(O, alg) // 2], [O])
    queue = [O]
    while queue:
        if X.mass() == target:
            break
        I = queue.pop(0)
        for J in _two_neighbors(I, O, alg):
            if any(is_isomorphic(J, C, alg) for C in X.classes):
                continue
            OL = left_order(J, alg)
            X.classes.append(J)
            X.left_orders.append(OL)
            X.weights.append(unit_count(OL, alg) // 2)
            queue.append(J)
            if X.mass() == target:
                break
    if X.mass() != target:
        raise ArithmeticError("mass formula not met by neighbor closure")
    return X


# ---------------------------------------------------------------------------
# Brandt matrices and the eigenform

def brandt_matrix(X: ShimuraSet, n: int):
    """B(n)_ij = (1/2w_j) #{x in I_i conj(I_j) : nrd(x) = n nrd(I_i) nrd(I_j)}."""
    alg = X.alg
    H = X.H
    out = [[0] * H for _ in range(H)]
    for i in range(H):
        for j in range(H):
            P = X.classes[i].product(X.classes[j].conjugate(), alg)
            target = n * X.classes[i].norm(alg) * X.classes[j].norm(alg)
            cnt = len([s for s in qf_solutions(P.gram(alg), target)
                       if any(s)])
            w2 = 2 * X.weights[j]
            if cnt % w2:
                raise ArithmeticError("Brandt count not divisible by 2w")
            out[i][j] = cnt // w2
    return out


def brandt_family(X: ShimuraSet, nmax: int) -> dict:
    """{n: B(n)} for 1 <= n <= nmax via one lattice enumeration per (i, j).

    Enumerating each I_i conj(I_j) once up to norm nmax and bucketing the
    counts by norm is much cheaper than one enumeration per n."""
    alg = X.alg
    H = X.H
    out = {n: [[0] * H for _ in range(H)] for n in range(1, nmax + 1)}
    for i in range(H):
        for j in range(H):
            P = X.classes[i].product(X.classes[j].conjugate(), alg)
            NN = X.classes[i].norm(alg) * X.classes[j].norm(alg)
            G = P.gram(alg)
            counts = [0] * (nmax + 1)
            for v in qf_enumerate(G, nmax * NN):
                if not any(v):
                    continue
                val = sum(v[r] * G[r][s] * v[s]
                          for r in range(4) for s in range(4))
                n = Fraction(val) / Fraction(NN)
                if n.denominator == 1 and n <= nmax:
                    counts[int(n)] += 1
            w2 = 2 * X.weights[j]
            for n in range(1, nmax + 1):
                if counts[n] % w2:
                    raise ArithmeticError("Brandt count not divisible by 2w")
                out[n][i][j] = counts[n] // w2
    return out


@dataclass
class Eigenform:
    coords: tuple
    eigenvalues: dict
    weights: tuple

    def value(self, idx: int) -> int:
        return self.coords[idx]


def eigenform(X: ShimuraSet, curve, p: int, primes=(2, 3, 5, 7, 13)) -> Eigenform:
    """The p-primitive integer eigenvector matching the curve's a_ell values."""
    from .curves import ap

    if curve.N != X.alg.q:
        raise ValueError("curve conductor differs from algebra discriminant")
    H = X.H
    eigs = {}
    stacked = []
    for ell in primes:
        if ell == X.alg.q:
            continue
        a = ap(curve, ell)
        eigs[ell] = a
        B = brandt_matrix(X, ell)
        for i in range(H):
            stacked.append([B[i][c] - (a if i == c else 0) for c in range(H)])
    # solve stacked . v = 0: v spans the left kernel of the transpose
    transpose = [[stacked[r][c] for r in range(len(stacked))]
                 for c in range(H)]
    kernel = left_kernel(transpose)
    if len(kernel) != 1:
        raise ArithmeticError(
            f"eigenspace dimension {len(kernel)}, expected 1")
    v = list(kernel[0])
    g = 0
    for x in v:
        g = gcd(g, x)
    v = [x // g for x in v]
    first = next(x for x in v if x)
    if first < 0:
        v = [-x for x in v]
    content = 0
    for x in v:
        content = gcd(content, x)
    if content % p == 0:
        raise ArithmeticError("eigenvector content divisible by p")
    cusp = sum(Fraction(x, w) for x, w in zip(v, X.weights))
    if cusp != 0:
        raise ArithmeticError("eigenform not orthogonal to constants")
    return Eigenform(tuple(v), eigs, tuple(X.weights))


# ---------------------------------------------------------------------------
# the two-sided ideal of norm q (Atkin-Lehner involution on classes)

def two_sided_ideal(O: Lattice, alg: QuaternionAlgebra) -> Lattice:
    """The unique two-sided O-ideal P with nrd(P) = q and P^2 = qO."""
    q = alg.q
    vs = O.vectors()
    T = [[int(Fraction(alg.trd(alg.mult(u, v)))) % q for v in vs] for u in vs]
    kern = _kernel_mod_p(T, q)
    rows = []
    for c in kern:
        rows.append([sum(c[t] * O.rows[t][col] for t in range(4))
                     for col in range(4)])
    rows += [[q * x for x in r] for r in O.rows]
    P = Lattice.make(rows, O.den)
    if P.norm(alg) != q:
        raise ArithmeticError("two-sided ideal has wrong norm")
    if P.product(P, alg) != O.scale(q):
        raise ArithmeticError("P^2 != qO")
    return P


def _kernel_mod_p(M, p: int):
    n = len(M)
    A = [[M[i][j] % p for j in range(n)] + [int(i == j) for j in range(n)]
         for i in range(n)]
    # column-reduce the left block to find row combinations vanishing mod p
    piv_rows = []
    for col in range(n):
        piv = next((r for r in range(n) if r not in piv_rows and A[r][col] % p),
                   None)
        if piv is None:
            continue
        inv = pow(A[piv][col], -1, p)
        A[piv] = [(x * inv) % p for x in A[piv]]
        for r in range(n):
            if r != piv and A[r][col] % p:
                f = A[r][col]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[piv])]
        piv_rows.append(piv)
    return [row[n:] for row in A if not any(x % p for x in row[:n])]


def tau_permutation(X: ShimuraSet) -> list:
    """Action of the norm-q two-sided ideal on classes: i -> class of I_i P."""
    P = two_sided_ideal(X.order, X.alg)
    return [X.classify(I.product(P, X.alg)) for I in X.classes]
