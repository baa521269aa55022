"""Resultant elimination for small square polynomial systems.

The driver only looks for solutions with every variable positive, so
monomial factors are divided out of every equation along the way.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath.libmp import NoConvergence

from zonet.solver import univariate as uv
from zonet.symbolic.polynomial import SparsePolynomial, Universe, determinant

WORK_DPS = 60
RATIONAL_ROOT_DENOMINATOR = 10**6


class ContinuumError(Exception):
    """The system has a positive-dimensional solution set (or cannot be reduced)."""


def strip_monomial(p: SparsePolynomial) -> SparsePolynomial:
    """Divide out the largest monomial dividing every term."""
    if not p.terms:
        return p
    lows = [min(col) for col in zip(*p.terms)]
    if not any(lows):
        return p
    return SparsePolynomial._raw(
        p.universe, {tuple(a - b for a, b in zip(e, lows)): c for e, c in p.terms.items()}
    )


def normalize(p: SparsePolynomial) -> SparsePolynomial:
    """Strip monomials and scale to a monic lexicographic leading term."""
    p = strip_monomial(p)
    if not p.terms:
        return p
    _, lc = p.leading()
    return p * (1 / lc) if lc != 1 else p


def coefficients_in(p: SparsePolynomial, var: str) -> list[SparsePolynomial]:
    """Coefficients of ``p`` as a polynomial in ``var``, constant first."""
    i = p.universe.index[var]
    buckets: dict[int, dict] = {}
    for e, c in p.terms.items():
        k = e[i]
        ne = e[:i] + (0,) + e[i + 1:]
        buckets.setdefault(k, {})[ne] = c
    deg = max(buckets, default=-1)
    return [SparsePolynomial._raw(p.universe, buckets.get(k, {})) for k in range(deg + 1)]


def resultant(p: SparsePolynomial, q: SparsePolynomial, var: str) -> SparsePolynomial:
    """Sylvester resultant with respect to ``var``."""
    a = coefficients_in(p, var)
    b = coefficients_in(q, var)
    n, m = len(a) - 1, len(b) - 1
    u = p.universe
    if n < 0 or m < 0:
        return u.zero()
    if n == 0:
        return a[0] ** m
    if m == 0:
        return b[0] ** n
    size = n + m
    zero = u.zero()
    rows = []
    for r in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[r + k] = a[n - k]
        rows.append(row)
    for r in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[r + k] = b[m - k]
        rows.append(row)
    return determinant(rows, u)


def univariate_coeffs(p: SparsePolynomial, var: str) -> list[Fraction]:
    i = p.universe.index[var]
    out: dict[int, Fraction] = {}
    for e, c in p.terms.items():
        if any(k for j, k in enumerate(e) if j != i):
            raise ValueError("polynomial is not univariate in " + var)
        out[e[i]] = out.get(e[i], 0) + c
    deg = max(out, default=-1)
    return [out.get(k, Fraction(0)) for k in range(deg + 1)]


class NumericPoly:
    """A polynomial prepared for repeated floating evaluation."""

    def __init__(self, p: SparsePolynomial, names: Sequence[str]):
        idx = [p.universe.index[n] for n in names]
        self.terms = []
        for e, c in p.terms.items():
            powers = tuple((j, e[i]) for j, i in enumerate(idx) if e[i])
            self.terms.append((c, powers))
        self.names = tuple(names)

    def __call__(self, values: Sequence, convert=mpmath.mpf):
        total = convert(0)
        for c, powers in self.terms:
            term = convert(c.numerator) / c.denominator
            for j, k in powers:
                term *= values[j] ** k
            total += term
        return total


def _specialize(p: SparsePolynomial, var: str, point: dict[str, object]) -> list:
    """Coefficients in ``var`` after substituting floating values for the rest."""
    names = p.universe.names
    i = p.universe.index[var]
    out: dict[int, object] = {}
    for e, c in p.terms.items():
        term = mpmath.mpf(c.numerator) / c.denominator
        for j, k in enumerate(e):
            if k and j != i:
                term *= point[names[j]] ** k
        out[e[i]] = out.get(e[i], 0) + term
    deg = max(out, default=-1)
    return [out.get(k, mpmath.mpf(0)) for k in range(deg + 1)]


def _scale(p: SparsePolynomial, point: dict[str, object]):
    """Rough magnitude of the terms of ``p`` at ``point``, to judge vanishing."""
    names = p.universe.names
    best = mpmath.mpf(0)
    for e, c in p.terms.items():
        term = abs(mpmath.mpf(c.numerator) / c.denominator)
        for j, k in enumerate(e):
            if k and names[j] in point:
                term *= abs(point[names[j]]) ** k
        best = max(best, term)
    return best


def _positive_real_roots(coeffs: Sequence, scale) -> list:
    coeffs = list(coeffs)
    tol = mpmath.mpf(10) ** (-(WORK_DPS // 2)) * (scale if scale else 1)
    while coeffs and abs(coeffs[-1]) <= tol:
        coeffs.pop()
    if len(coeffs) <= 1:
        return None if not coeffs else []
    if len(coeffs) == 2:
        r = -coeffs[0] / coeffs[1]
        return [r] if r > 0 else []
    try:
        roots = mpmath.polyroots(coeffs[::-1], maxsteps=400, extraprec=2 * WORK_DPS)
    except NoConvergence:
        roots = mpmath.polyroots(coeffs[::-1], maxsteps=4000, extraprec=6 * WORK_DPS, error=False)
    out = []
    for z in roots:
        z = mpmath.mpc(z)
        if abs(z.imag) <= mpmath.mpf(10) ** (-WORK_DPS // 3) * max(1, abs(z)) and z.real > 0:
            out.append(mpmath.mpf(z.real))
    return out


@dataclass
class EliminationOutcome:
    """Approximate solutions, plus exactly known rational ones kept apart."""

    points: list[dict[str, object]]
    order: tuple[str, ...]
    exact: list[dict[str, Fraction]] = field(default_factory=list)


def _degree_score(eqs: Sequence[SparsePolynomial], var: str) -> tuple:
    return (sum(e.degree(var) for e in eqs if e.degree(var) > 0), var)


def solve_positive(
    eqs: Sequence[SparsePolynomial],
    variables: Sequence[str],
    root_width: Fraction = Fraction(1, 10**12),
) -> EliminationOutcome:
    """Approximate every solution of ``eqs = 0`` with all variables positive.

    Raises :class:`ContinuumError` if every elimination order produces an
    identically vanishing resultant or a free variable.
    """
    with mpmath.workdps(WORK_DPS):
        return _solve(list(eqs), list(variables), root_width)


def _solve(eqs: list[SparsePolynomial], variables: list[str], width: Fraction) -> EliminationOutcome:
    eqs = [normalize(e) for e in eqs]
    if any(e.is_zero() for e in eqs):
        raise ContinuumError("an equation vanishes identically")
    if any(e.is_constant() for e in eqs):
        return EliminationOutcome([], tuple(variables))
    eqs = list(dict.fromkeys(eqs))
    if len(eqs) < len(variables):
        raise ContinuumError("fewer independent equations than unknowns")
    if len(variables) == 1:
        return _solve_univariate(eqs, variables[0], width)

    orders = sorted(variables, key=lambda v: _degree_score(eqs, v))
    failure = None
    for var in orders:
        with_v = [e for e in eqs if e.degree(var) > 0]
        without = [e for e in eqs if e.degree(var) <= 0]
        if not with_v:
            failure = ContinuumError(f"{var} is unconstrained")
            continue
        pivots = sorted(range(len(with_v)), key=lambda k: (with_v[k].degree(var), len(with_v[k])))
        for pk in pivots:
            pivot = with_v[pk]
            reduced = list(without)
            ok = True
            for k, e in enumerate(with_v):
                if k == pk:
                    continue
                res = normalize(resultant(pivot, e, var))
                if res.is_zero():
                    ok = False
                    break
                reduced.append(res)
            if not ok:
                failure = ContinuumError("resultant vanishes identically")
                continue
            rest = [v for v in variables if v != var]
            if len(reduced) > len(rest):
                # Keep the system square; extra equations only filter roots.
                reduced = _pick_square(reduced, rest)
            try:
                sub = _solve(reduced, rest, width)
            except ContinuumError as exc:
                failure = exc
                continue
            approx = sub.points + [{n: mpmath.mpf(v.numerator) / v.denominator for n, v in pt.items()} for pt in sub.exact]
            points = _back_substitute(approx, with_v, pk, var, eqs)
            if points is None:
                failure = ContinuumError("back-substitution vanished")
                continue
            return EliminationOutcome(points, (var,) + sub.order)
    raise failure or ContinuumError("no elimination order succeeded")


def _pick_square(eqs: list[SparsePolynomial], variables: list[str]) -> list[SparsePolynomial]:
    return sorted(eqs, key=lambda e: (e.total_degree(), len(e)))[: len(variables)]


def _solve_univariate(eqs: list[SparsePolynomial], var: str, width: Fraction) -> EliminationOutcome:
    base = eqs[0]
    coeffs = univariate_coeffs(base, var)
    for other in eqs[1:]:
        coeffs = uv.poly_gcd(coeffs, univariate_coeffs(other, var))
    points, exact = [], []
    sf = uv.squarefree(uv.strip_zero_roots(coeffs))
    for a, b in uv.isolate_positive_roots(coeffs, width):
        if a != b:
            # Recover rational roots with small denominators exactly; boundary
            # roots of the lifted point are of this kind.
            guess = ((a + b) / 2).limit_denominator(RATIONAL_ROOT_DENOMINATOR)
            if a <= guess <= b and uv.evaluate(sf, guess) == 0:
                a = b = guess
        if a == b:
            exact.append({var: a})
            continue
        points.append({var: _polish_univariate(sf, a, b)})
    return EliminationOutcome(points, (var,), exact)


def _polish_univariate(p: Sequence[int], a: Fraction, b: Fraction):
    """Newton from the midpoint of a bracket, falling back on the bracket."""
    dp = uv.derivative(p)
    lo = mpmath.mpf(a.numerator) / a.denominator
    hi = mpmath.mpf(b.numerator) / b.denominator
    x = (lo + hi) / 2
    for _ in range(100):
        fx = uv.evaluate(p, x)
        dfx = uv.evaluate(dp, x)
        if dfx == 0:
            break
        nx = x - fx / dfx
        if not (lo <= nx <= hi):
            break
        if abs(nx - x) <= abs(x) * mpmath.mpf(10) ** (-WORK_DPS + 5):
            x = nx
            break
        x = nx
    return x


def _back_substitute(points, with_v, pivot_index, var, all_eqs):
    out = []
    order = [pivot_index] + [k for k in range(len(with_v)) if k != pivot_index]
    for point in points:
        roots = None
        for k in order:
            e = with_v[k]
            coeffs = _specialize(e, var, point)
            roots = _positive_real_roots(coeffs, _scale(e, point))
            if roots is not None:
                break
        if roots is None:
            return None
        for r in roots:
            cand = dict(point)
            cand[var] = r
            if _residual_ok(all_eqs, cand):
                out.append(cand)
    return out


def _residual_ok(eqs, point) -> bool:
    for e in eqs:
        names = [n for n in e.universe.names if n in point]
        val = NumericPoly(e, names)([point[n] for n in names])
        scale = _scale(e, point)
        if abs(val) > mpmath.mpf(10) ** (-WORK_DPS // 4) * (scale if scale else 1):
            return False
    return True
