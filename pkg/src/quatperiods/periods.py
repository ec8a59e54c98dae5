"""Toric periods of a quaternionic eigenform twisted by class-group
characters, their mod-p non-vanishing counts, horizontal scans over
discriminants, and equidistribution statistics of special points.

For a class group of exponent n the period of the character chi is
    P(chi) = h^{-1} sum_sigma chi(sigma)^{-1} f(x_sigma),
held exactly as h.P in Z[zeta_n] and reduced through the deterministic
embedding into F_{p^k}. The non-vanishing count ell_K is the number of
characters whose reduction is a unit, and the set of those characters is
checked to be stable under chi -> chi^{q0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .bqf import ClassGroup, class_group_structure, is_fundamental
from .charfield import (
    Character,
    CycloInt,
    FieldEmbedding,
    _reduce_poly,
    character_group,
    galois_orbits,
)
from .curves import kronecker
from .embeddings import optimal_embedding, phi_map
from .quatalg import (
    Eigenform,
    ShimuraSet,
    build_algebra,
    eigenform,
    maximal_order,
    right_ideal_classes,
)


@dataclass(frozen=True)
class ToricPeriod:
    chi: Character
    exact: CycloInt          # h . P(chi), an exact cyclotomic integer
    modp: tuple              # P(chi) in the finite field
    vzero: bool              # True when the reduction is a unit

    def __post_init__(self):
        assert self.vzero == (self.modp != tuple([0] * len(self.modp)))


def toric_period(f: Eigenform, phi: dict, chi: Character,
                 emb: FieldEmbedding) -> ToricPeriod:
    """P(chi) from the special-points map phi: sigma -> index into X."""
    h = len(phi)
    if h % emb.p == 0:
        raise ValueError("p divides the class number")
    n = chi.level
    if emb.n != n:
        raise ValueError("embedding level mismatch")
    chinv = chi.inverse()
    cyc = [0] * n
    for sigma, idx in phi.items():
        cyc[chinv.pairing_exponent(sigma)] += f.coords[idx]
    exact = CycloInt(n, _reduce_poly(cyc, n))
    F = emb.field
    acc = F.zero
    zp = F.one
    for e in range(n):
        if cyc[e] % emb.p:
            acc = F.add(acc, F.mul(F.element(cyc[e]), zp))
        zp = F.mul(zp, emb.zeta_image)
    modp = F.mul(acc, F.inv(F.element(h)))
    return ToricPeriod(chi, exact, modp, modp != F.zero)


@dataclass
class ScanRow:
    D: int
    h: int
    q0: int
    ellK: int
    orbit_count: int
    xi_set: tuple            # exponent vectors of non-vanishing characters
    log_bound: float         # (ln |D|)^(1 - eps), presentational
    reason: str = ""         # empty for emitted rows, else the skip reason

    @property
    def emitted(self) -> bool:
        return self.reason == ""


def galois_base_size(f: Eigenform, p: int) -> int:
    """Size of the subfield generated by the mod-p values of the eigenform.

    The coordinates are rational integers, so the subfield is the prime
    field and the answer is p; kept as a function so the provenance of q0
    is explicit at call sites.
    """
    assert all(isinstance(c, int) for c in f.coords)
    return p


class PeriodPipeline:
    """Fixed (q, curve, p): Shimura set, eigenform, and per-D period rows."""

    def __init__(self, curve, p: int, primes=(2, 3, 5, 7, 13), X=None):
        self.curve = curve
        self.q = curve.N
        self.p = p
        if X is None:
            alg = build_algebra(self.q)
            X = right_ideal_classes(maximal_order(alg), alg)
        self.alg = X.alg
        self.order = X.order
        self.X = X
        self.f = eigenform(self.X, curve, p, primes)
        self.q0 = galois_base_size(self.f, p)

    def skip_reason(self, D: int) -> str:
        if not is_fundamental(D):
            return "non-fundamental"
        if D in (-3, -4):
            return "excluded field"
        if D % self.q == 0:
            return "ramified"
        if kronecker(D, self.q) == 1:
            return "split"
        if class_group_structure(D).h % self.p == 0:
            return "p|h"
        return ""

    def periods(self, cg: ClassGroup, phi: dict, emb: FieldEmbedding):
        return {chi: toric_period(self.f, phi, chi, emb)
                for chi in character_group(cg)}

    def row(self, D: int, eps: float = 0.1, check_embedding: bool = True,
            check_fourier: bool = True) -> ScanRow:
        reason = self.skip_reason(D)
        log_bound = math.log(abs(D)) ** (1 - eps) if D < -1 else 0.0
        if reason:
            return ScanRow(D, 0, self.q0, 0, 0, (), log_bound, reason)
        cg = class_group_structure(D)
        n = cg.exponent
        emb = FieldEmbedding(self.p, n)
        phi = phi_map(optimal_embedding(self.X, D), cg, self.X)
        pers = self.periods(cg, phi, emb)
        xi = tuple(sorted(chi.exponents for chi, P in pers.items()
                          if P.vzero))
        orbits = galois_orbits(list(pers), self.q0 % n if n > 1 else 1)
        xi_lookup = set(xi)
        orbit_count = 0
        for orb in orbits:
            inside = [chi.exponents in xi_lookup for chi in orb]
            if any(inside):
                orbit_count += 1
                if not all(inside):
                    raise ArithmeticError(
                        f"non-vanishing set not Galois stable at D={D}")
        if check_fourier:
            self._fourier_check(pers, phi, emb)
        if check_embedding:
            phi2 = phi_map(optimal_embedding(self.X, D, which=1), cg, self.X)
            pers2 = self.periods(cg, phi2, emb)
            ell2 = sum(1 for P in pers2.values() if P.vzero)
            if ell2 != len(xi):
                raise ArithmeticError(
                    f"ell_K depends on the embedding at D={D}")
        return ScanRow(D, cg.h, self.q0, len(xi), orbit_count, xi,
                       log_bound)

    def _fourier_check(self, pers: dict, phi: dict, emb: FieldEmbedding):
        """Inverse transform of the periods must reproduce sigma -> f(x_sigma)."""
        F = emb.field
        n = emb.n
        zpows = [F.one]
        for _ in range(n - 1):
            zpows.append(F.mul(zpows[-1], emb.zeta_image))
        for sigma, idx in phi.items():
            acc = F.zero
            for chi, P in pers.items():
                acc = F.add(acc, F.mul(P.modp,
                                       zpows[chi.pairing_exponent(sigma)]))
            if acc != F.element(self.f.coords[idx]):
                raise ArithmeticError("Fourier inversion failed on a row")

    def trivial_period_sum(self, D: int) -> int:
        """h . P(1) = sum_sigma f(x_sigma), an ordinary integer."""
        cg = class_group_structure(D)
        phi = phi_map(optimal_embedding(self.X, D), cg, self.X)
        return sum(self.f.coords[idx] for idx in phi.values())


def horizontal_scan(pipe: PeriodPipeline, dmax: int, eps: float = 0.1,
                    dmin: int = 5, **row_kwargs):
    """Rows for every D with dmin <= |D| <= dmax; skips carry reasons."""
    rows = []
    for D in range(-dmin, -dmax - 1, -1):
        rows.append(pipe.row(D, eps, **row_kwargs))
    return rows


def scan_summary(rows) -> dict:
    emitted = [r for r in rows if r.emitted]
    windows = {}
    for r in emitted:
        k = max(0, abs(r.D).bit_length() - 1)
        win = (2 ** k, 2 ** (k + 1))
        windows.setdefault(win, []).append(r)
    table = []
    for win in sorted(windows):
        rs = windows[win]
        table.append({
            "window": list(win),
            "rows": len(rs),
            "min_ellK": min(r.ellK for r in rs),
            "mean_ellK": sum(r.ellK for r in rs) / len(rs),
            "max_ellK": max(r.ellK for r in rs),
            "mean_log_bound": sum(r.log_bound for r in rs) / len(rs),
        })
    skip_counts = {}
    for r in rows:
        if not r.emitted:
            skip_counts[r.reason] = skip_counts.get(r.reason, 0) + 1
    return {"emitted": len(emitted), "skipped": skip_counts,
            "windows": table}


# ---------------------------------------------------------------------------
# equidistribution statistics

def target_measure(X: ShimuraSet):
    """Probability measure on X proportional to 1/w_x, as exact Fractions."""
    inv = [Fraction(1, w) for w in X.weights]
    total = sum(inv, Fraction(0))
    return [v / total for v in inv]


def tv_distance(counts, measure) -> Fraction:
    total = sum(counts)
    if total == 0:
        return Fraction(0)
    return sum((abs(Fraction(c, total) - m)
                for c, m in zip(counts, measure)), Fraction(0)) / 2


def empirical_counts(phi: dict, H: int, subgroup=None):
    counts = [0] * H
    for sigma, idx in phi.items():
        if subgroup is None or sigma in subgroup:
            counts[idx] += 1
    return counts


def dual_subgroups_upto(orders, bound: int):
    """All subgroups of the character group with order <= bound."""
    chars = character_group(orders)
    found = {frozenset({tuple(0 for _ in orders)})}
    frontier = [frozenset({tuple(0 for _ in orders)})]
    while frontier:
        sub = frontier.pop()
        for chi in chars:
            if chi.exponents in sub:
                continue
            new = _subgroup_closure(sub | {chi.exponents}, orders)
            if len(new) <= bound and new not in found:
                found.add(new)
                frontier.append(new)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _subgroup_closure(gens, orders):
    out = set(gens)
    out.add(tuple(0 for _ in orders))
    frontier = list(out)
    while frontier:
        g = frontier.pop()
        for e in list(out):
            s = tuple((a + b) % n for a, b, n in zip(g, e, orders))
            if s not in out:
                out.add(s)
                frontier.append(s)
    return frozenset(out)


def annihilated_subgroup(dual_sub, orders):
    """{sigma : chi(sigma) = 1 for all chi in the dual subgroup}."""
    out = set()
    for sigma in _all_elements(orders):
        if all(Character(chi, tuple(orders)).pairing_exponent(sigma) == 0
               for chi in dual_sub):
            out.add(sigma)
    return out


def _all_elements(orders):
    if not orders:
        return [()]
    rest = _all_elements(orders[1:])
    return [(e,) + r for e in range(orders[0]) for r in rest]


@dataclass
class EquidistRow:
    D: int
    h: int
    tv: Fraction
    subgroup_tvs: tuple      # (index, tv) pairs for proper dual subgroups


def equidist_stats(pipe: PeriodPipeline, D: int,
                   index_bound: int = 4) -> EquidistRow:
    cg = class_group_structure(D)
    phi = phi_map(optimal_embedding(pipe.X, D), cg, pipe.X)
    measure = target_measure(pipe.X)
    tv = tv_distance(empirical_counts(phi, pipe.X.H), measure)
    subs = []
    for dual in dual_subgroups_upto(cg.orders, index_bound):
        if len(dual) == 1:
            continue
        H_sub = annihilated_subgroup(dual, cg.orders)
        counts = empirical_counts(phi, pipe.X.H, H_sub)
        subs.append((len(dual), tv_distance(counts, measure)))
    return EquidistRow(D, cg.h, tv, tuple(subs))
