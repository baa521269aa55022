"""Extreme rays of the flux cone {g >= 0 : N g = 0} and flux decompositions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from zonet import linalg
from zonet.network.stoich import StoichiometricData


@dataclass(frozen=True)
class ExtremeRaySet:
    """Generating rays of a pointed flux cone, as coprime nonnegative integers.

    Rays are sorted by support size, then support, then entries, so
    positional indices are reproducible.
    """

    m: int
    rays: tuple[tuple[int, ...], ...]

    @property
    def t(self) -> int:
        return len(self.rays)

    def support(self, k: int) -> frozenset[int]:
        return frozenset(j for j, v in enumerate(self.rays[k]) if v)

    @cached_property
    def reaction_rays(self) -> tuple[frozenset[int], ...]:
        """For each reaction i, the rays k with a nonzero i-th entry."""
        return tuple(frozenset(k for k, ray in enumerate(self.rays) if ray[i]) for i in range(self.m))

    def matrix(self) -> list[list[int]]:
        """The m x t matrix whose columns are the rays."""
        return [[ray[i] for ray in self.rays] for i in range(self.m)]

    def restrict(self, reactions: Sequence[int]) -> "ExtremeRaySet":
        """Rays of the face where only ``reactions`` may carry flux.

        The result is indexed by position in ``reactions``.
        """
        keep = set(reactions)
        rays = [
            tuple(ray[j] for j in reactions)
            for ray in self.rays
            if all(v == 0 or j in keep for j, v in enumerate(ray))
        ]
        return ExtremeRaySet(len(reactions), tuple(sorted(rays, key=_ray_key)))


def _ray_key(ray: Sequence[int]):
    supp = tuple(j for j, v in enumerate(ray) if v)
    return (len(supp), supp, tuple(ray))


def _adjacent(eq_rows: list[list[Fraction]], zeros: frozenset[int], m: int) -> bool:
    """Two rays sharing ``zeros`` span a 2-face iff the active rows have rank m - 2."""
    free = [j for j in range(m) if j not in zeros]
    if len(zeros) < m - 2 - len(eq_rows):
        return False
    sub = [[row[j] for j in free] for row in eq_rows]
    r = linalg.rank(sub) if sub and free else 0
    return len(zeros) + r == m - 2


def extreme_rays_of(N: Sequence[Sequence[int]], m: int) -> ExtremeRaySet:
    """Double description: start from the orthant, add each equality of N g = 0."""
    rows, _ = linalg.rref(N) if N and m else ([], [])
    rays: list[tuple[int, ...]] = [tuple(int(i == j) for j in range(m)) for i in range(m)]
    processed: list[list[Fraction]] = []
    for row in rows:
        vals = [sum(a * b for a, b in zip(row, ray)) for ray in rays]
        zero = [ray for ray, v in zip(rays, vals) if v == 0]
        pos = [(ray, v) for ray, v in zip(rays, vals) if v > 0]
        neg = [(ray, v) for ray, v in zip(rays, vals) if v < 0]
        processed.append(row)
        zsets = {ray: frozenset(j for j, x in enumerate(ray) if x == 0) for ray in rays}
        new = list(zero)
        for pr, pv in pos:
            for nr, nv in neg:
                common = zsets[pr] & zsets[nr]
                if not _adjacent(processed[:-1], common, m):
                    continue
                combo = [pv * b - nv * a for a, b in zip(pr, nr)]
                new.append(linalg.primitive_integer_vector(combo))
        rays = list(dict.fromkeys(new))
    # Rays from an orthant start are extreme when adjacency is exact; the
    # support-minimality filter below only guards against duplicates.
    rays = _support_minimal(rays)
    return ExtremeRaySet(m, tuple(sorted(rays, key=_ray_key)))


def _support_minimal(rays: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    supports = [frozenset(j for j, v in enumerate(r) if v) for r in rays]
    out = []
    for i, r in enumerate(rays):
        if any(supports[k] < supports[i] for k in range(len(rays)) if k != i):
            continue
        out.append(r)
    return out


def extreme_rays(sd: StoichiometricData) -> ExtremeRaySet:
    return extreme_rays_of(sd.N, sd.m)


def strictly_positive_flux_exists(rays: ExtremeRaySet) -> bool:
    """True iff some g > 0 satisfies N g = 0, i.e. the rays cover every reaction."""
    covered = set()
    for ray in rays.rays:
        covered.update(j for j, v in enumerate(ray) if v)
    return len(covered) == rays.m


def decompose_flux(gamma: Sequence, rays: ExtremeRaySet) -> tuple[Fraction, ...] | None:
    """Find lambda >= 0 with sum_k lambda_k R^(k) = gamma, or None.

    Phase-one simplex over the rationals with Bland's rule.
    """
    gamma = [Fraction(g) for g in gamma]
    m, t = rays.m, rays.t
    if len(gamma) != m:
        raise ValueError("gamma has the wrong length")
    if any(g < 0 for g in gamma):
        return None
    if t == 0:
        return () if all(g == 0 for g in gamma) else None
    # Tableau rows: [R | I | gamma]; basis starts on the artificials.
    R = rays.matrix()
    n = t + m
    tab = [[Fraction(R[i][k]) for k in range(t)] + [Fraction(int(i == a)) for a in range(m)] + [gamma[i]] for i in range(m)]
    basis = [t + i for i in range(m)]
    # Objective: minimise the sum of artificials; reduced costs row.
    cost = [Fraction(0)] * (n + 1)
    for i in range(m):
        for j in range(n + 1):
            cost[j] -= tab[i][j]
    for j in range(t, t + m):
        cost[j] = Fraction(0)
    while True:
        enter = next((j for j in range(n) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][n] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break
        _, r = best
        piv = tab[r][enter]
        tab[r] = [v / piv for v in tab[r]]
        for i in range(m):
            if i != r and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[r])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, tab[r])]
        basis[r] = enter
    if cost[n] != 0:
        return None
    lam = [Fraction(0)] * t
    for i, b in enumerate(basis):
        if b < t:
            lam[b] = tab[i][n]
        elif tab[i][n] != 0:
            return None
    for i in range(m):
        if sum(R[i][k] * lam[k] for k in range(t)) != gamma[i]:
            return None
    return tuple(lam)
