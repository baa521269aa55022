"""Positive steady states at fixed rational parameters, with certified
enclosures, nondegeneracy and stability labels.

The conservation laws W x = c are used to eliminate the pivot species, which
leaves a square system in the remaining r species. That system is solved by
resultant elimination; every candidate root is polished in extended precision
and certified with the Krawczyk test in exact rational interval arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import mpmath

from zonet.linalg import positive_solution_exists
from zonet.network.core import ReactionNetwork
from zonet.network.stoich import StoichiometricData, stoichiometric_data
from zonet.solver.elimination import WORK_DPS, ContinuumError, NumericPoly, solve_positive
from zonet.solver.interval import Interval, round_dyadic
from zonet.symbolic.massaction import build_f, build_h, jacobian
from zonet.symbolic.polynomial import SparsePolynomial, Universe

ENCLOSURE_WIDTH = Fraction(1, 10**12)


def mpf_to_fraction(x) -> Fraction:
    x = mpmath.mpf(x)
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    val = Fraction(int(man)) * (Fraction(2) ** exp)
    return -val if sign else val


def _sign(v) -> int | None:
    if isinstance(v, Interval):
        return v.sign()
    return (v > 0) - (v < 0)


def _det(a):
    n = len(a)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = 0
    for j in range(n):
        if isinstance(a[0][j], Fraction) and a[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def principal_minor_sums(a) -> list:
    """E_0, ..., E_n: sums of k x k principal minors."""
    n = len(a)
    out = [Fraction(1)]
    for k in range(1, n + 1):
        total = 0
        for idx in combinations(range(n), k):
            total = total + _det([[a[i][j] for j in idx] for i in idx])
        out.append(total)
    return out


def hurwitz_determinants(coeffs: Sequence) -> list:
    """H_1..H_n for b_0 + b_1 z + ... + b_n z^n (constant term first)."""
    n = len(coeffs) - 1

    def b(k):
        return coeffs[k] if 0 <= k <= n else Fraction(0)

    out = []
    for size in range(1, n + 1):
        mat = [[b(n - 2 * i + j) for j in range(1, size + 1)] for i in range(1, size + 1)]
        out.append(_det(mat))
    return out


@dataclass(frozen=True)
class HurwitzData:
    """Characteristic polynomial det(lambda E - Jac_f), constant term first,
    and the Hurwitz determinants of its degree-r factor carrying the nonzero
    spectrum (the full polynomial when d = 0)."""

    char_poly: tuple
    cofactor: tuple
    hurwitz_determinants: tuple


@dataclass
class SteadyStateSolution:
    x: tuple[Interval, ...]
    nondegenerate: bool
    stability: str
    det_jac_h_sign: int
    det_jac_f_sign: int
    hurwitz: HurwitzData | None = None
    certified: bool = True

    @property
    def midpoint(self) -> tuple[float, ...]:
        return tuple(float(iv.mid) for iv in self.x)

    def to_json(self) -> dict:
        return {
            "x": [f"{float(iv.mid):.12g}" for iv in self.x],
            "enclosure": [[str(iv.lo), str(iv.hi)] for iv in self.x],
            "nondegenerate": self.nondegenerate,
            "stability": self.stability,
            "det_jac_h_sign": self.det_jac_h_sign,
            "det_jac_f_sign": self.det_jac_f_sign,
            "certified": self.certified,
        }


@dataclass
class SolveResult:
    """Outcome of a fixed-parameter solve.

    ``status`` is ``finite`` or ``degenerate-continuum``.
    """

    status: str
    solutions: list[SteadyStateSolution] = field(default_factory=list)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]

    @property
    def nondegenerate(self) -> list[SteadyStateSolution]:
        return [s for s in self.solutions if s.nondegenerate]

    @property
    def stable(self) -> list[SteadyStateSolution]:
        return [s for s in self.solutions if s.stability == "stable"]


class SteadyStateProblem:
    """Symbolic data for one network, reused across parameter values."""

    def __init__(self, net: ReactionNetwork | StoichiometricData):
        sd = net if isinstance(net, StoichiometricData) else stoichiometric_data(net)
        # Rank-one systems reduce to one univariate equation at any size.
        if sd.s > 4 and sd.rank > 1:
            raise ValueError("the solver handles at most four species above rank one")
        self.sd = sd
        self.ss = build_f(sd)
        self.aug = build_h(self.ss, sd)
        self.x = list(self.ss.x)
        self.jac_f = jacobian(self.ss.f, self.x)
        self.jac_h = jacobian(self.aug.h, self.x)
        self.free = [i for i in range(sd.s) if i not in sd.leading]
        self.free_names = [self.x[i] for i in self.free]
        self.y_universe = Universe(tuple(self.free_names))

    # -- reduced system ------------------------------------------------------
    def _reduced(self, kappa: Sequence[Fraction], c: Sequence[Fraction]):
        u = self.ss.universe
        kap = dict(zip(self.ss.kappa, kappa))
        pivots = {}
        for k, (row, lead) in enumerate(zip(self.sd.W, self.sd.leading)):
            expr = u.const(c[k])
            for j in self.free:
                if row[j]:
                    expr = expr - u.var(self.x[j]) * row[j]
            pivots[self.x[lead]] = expr
        eqs = []
        for i in self.free:
            g = self.ss.f[i].subs(kap)
            if pivots:
                g = g.substitute_poly(pivots)
            eqs.append(g.restrict(self.y_universe))
        return eqs, pivots

    def _lift(self, y: Sequence, c: Sequence[Fraction]) -> list:
        """Full species vector from the free coordinates."""
        x = [None] * self.sd.s
        for j, i in enumerate(self.free):
            x[i] = y[j]
        for k, (row, lead) in enumerate(zip(self.sd.W, self.sd.leading)):
            val = Interval(c[k]) if isinstance(y[0], Interval) else c[k]
            for j in self.free:
                if row[j]:
                    val = val - x[j] * row[j]
            x[lead] = val
        return x

    # -- labels ----------------------------------------------------------------
    def _matrix_at(self, polys, kappa, x):
        assign = dict(zip(self.ss.kappa, kappa))
        assign.update(zip(self.x, x))
        for k in range(self.sd.d):
            assign[f"c{k + 1}"] = Fraction(0)
        return [[p.evaluate(assign) if p else Fraction(0) for p in row] for row in polys]

    def hurwitz_data(self, kappa, x) -> HurwitzData:
        A = self._matrix_at(self.jac_f, kappa, x)
        E = principal_minor_sums(A)
        s, r = self.sd.s, self.sd.rank
        # det(lambda E - A) = sum_j (-1)^j E_j lambda^(s-j)
        char = [Fraction(0)] * (s + 1)
        for j in range(s + 1):
            char[s - j] = E[j] if j % 2 == 0 else -E[j]
        cof = [E[r - k] if (r - k) % 2 == 0 else -E[r - k] for k in range(r + 1)]
        return HurwitzData(tuple(char), tuple(cof), tuple(hurwitz_determinants(cof)))

    def labels(self, kappa, x) -> tuple[bool, str, int, int, HurwitzData]:
        Jh = self._matrix_at(self.jac_h, kappa, x)
        det_h = _det(Jh)
        sign_h = _sign(det_h)
        det_f = _det(self._matrix_at(self.jac_f, kappa, x))
        sign_f = _sign(det_f)
        hd = self.hurwitz_data(kappa, x)
        if sign_h is None or sign_h == 0:
            return False, "undetermined", 0, sign_f or 0, hd
        r = self.sd.rank
        if r == 1:
            stability = "stable" if sign_h < 0 else "unstable"
        elif r == 2:
            trace_sign = _sign(-hd.cofactor[1])  # trace = E_1 = -b_1
            if sign_h < 0 or trace_sign == 1:
                stability = "unstable"
            elif trace_sign == -1:
                stability = "stable"
            else:
                stability = "undetermined"
        else:
            signs = [_sign(v) for v in hd.hurwitz_determinants]
            if all(sg == 1 for sg in signs):
                stability = "stable"
            elif any(sg == -1 for sg in signs) or any(_sign(b) == -1 for b in hd.cofactor):
                stability = "unstable"
            else:
                stability = "undetermined"
        return True, stability, sign_h, sign_f if sign_f is not None else 0, hd

    # -- solving -----------------------------------------------------------------
    def solve(self, kappa: Sequence, c: Sequence | None = None) -> SolveResult:
        kappa = [Fraction(k) for k in kappa]
        if len(kappa) != self.sd.m:
            raise ValueError(f"expected {self.sd.m} rate constants, got {len(kappa)}")
        if any(k <= 0 for k in kappa):
            raise ValueError("rate constants must be positive")
        c = [Fraction(v) for v in (c or [])]
        if len(c) != self.sd.d:
            raise ValueError(f"expected {self.sd.d} total constants, got {len(c)}")
        eqs, _ = self._reduced(kappa, c)
        try:
            outcome = solve_positive(eqs, self.free_names)
        except ContinuumError:
            # A vanishing system only means a positive continuum when the
            # class itself reaches into the positive orthant.
            if positive_solution_exists(self.sd.W, c, self.sd.s):
                return SolveResult("degenerate-continuum", [])
            return SolveResult("finite", [])
        sols: list[SteadyStateSolution] = []
        for point in outcome.exact:
            x = self._lift([Interval(point[n]) for n in self.free_names], c)
            if any(iv.lo <= 0 for iv in x):
                continue
            nondeg, stab, sh, sf, hd = self.labels(kappa, x)
            sols.append(SteadyStateSolution(tuple(x), nondeg, stab, sh, sf, hd, True))
        with mpmath.workdps(WORK_DPS):
            numeric = [NumericPoly(e, self.free_names) for e in eqs]
            jac = [[NumericPoly(e.diff(v), self.free_names) for v in self.free_names] for e in eqs]
            jac_exact = [[e.diff(v) for v in self.free_names] for e in eqs]
            for point in outcome.points:
                y = [point[n] for n in self.free_names]
                y = _newton(numeric, jac, y)
                if y is None:
                    continue
                box = _krawczyk(eqs, jac_exact, y, self.free_names)
                certified = box is not None
                if certified:
                    box = [iv.outward() for iv in box]
                if not certified:
                    box = _residual_box(eqs, y, self.free_names)
                    if box is None:
                        continue
                x = self._lift(box, c)
                if any(iv.lo <= 0 for iv in x):
                    continue
                if any(_overlap(x, other.x) for other in sols):
                    continue
                nondeg, stab, sh, sf, hd = self.labels(kappa, x)
                if not certified:
                    nondeg, stab, sh = False, "undetermined", 0
                sols.append(SteadyStateSolution(tuple(x), nondeg, stab, sh, sf, hd, certified))
        sols.sort(key=lambda s: s.midpoint)
        return SolveResult("finite", sols)


def _overlap(a: Sequence[Interval], b: Sequence[Interval]) -> bool:
    return all(x.lo <= y.hi and y.lo <= x.hi for x, y in zip(a, b))


def _newton(funcs, jac, y, steps: int = 30):
    y = [mpmath.mpf(v) for v in y]
    n = len(y)
    tol = mpmath.mpf(10) ** (-WORK_DPS + 8)
    for _ in range(steps):
        F = mpmath.matrix([f(y) for f in funcs])
        J = mpmath.matrix([[d(y) for d in row] for row in jac])
        try:
            delta = mpmath.lu_solve(J, F)
        except ZeroDivisionError:
            return y
        y = [y[i] - delta[i] for i in range(n)]
        if max(abs(delta[i]) for i in range(n)) <= tol * max(1, max(abs(v) for v in y)):
            break
    if any(v <= 0 for v in y):
        return None
    return y


def _radius(v) -> Fraction:
    v = abs(mpf_to_fraction(v))
    return min(Fraction(4, 10**13), v / 1000)


def _krawczyk(eqs, jac_exact, y, names, attempts: int = 3):
    """Certified box holding a unique root of ``eqs``, or None."""
    n = len(y)
    # Short dyadic centers and preconditioner keep the exact arithmetic cheap;
    # the Krawczyk test is valid for any center and any C.
    center = [round_dyadic(mpf_to_fraction(v)) for v in y]
    assign = dict(zip(names, center))
    g0 = [e.evaluate(assign) for e in eqs]
    Jc = mpmath.matrix([[mpmath.mpf(d.evaluate(assign).numerator) / d.evaluate(assign).denominator for d in row] for row in jac_exact])
    try:
        Cm = mpmath.inverse(Jc)
    except ZeroDivisionError:
        return None
    C = [[round_dyadic(mpf_to_fraction(Cm[i, j]), 64) for j in range(n)] for i in range(n)]
    Cg = [sum(C[i][k] * g0[k] for k in range(n)) for i in range(n)]
    radii = [_radius(v) for v in y]
    for _ in range(attempts):
        if any(rd <= 0 for rd in radii):
            return None
        box = [Interval.around(cv, rd).outward() for cv, rd in zip(center, radii)]
        bassign = dict(zip(names, box))
        JY = [[d.evaluate(bassign) if d else Interval(0) for d in row] for row in jac_exact]
        ok = True
        K = []
        for i in range(n):
            acc = Interval(center[i] - Cg[i]).outward()
            for j in range(n):
                coeff = Interval(int(i == j))
                for k in range(n):
                    coeff = coeff - C[i][k] * JY[k][j]
                acc = acc + coeff * (box[j] - center[j])
            K.append(acc)
            if not box[i].contains_interval(acc, strict=True):
                ok = False
                break
        if ok:
            return K
        radii = [rd / 1000 for rd in radii]
    return None


def _residual_box(eqs, y, names):
    """Tiny box around an uncertified root whose residual enclosure holds 0."""
    center = [mpf_to_fraction(v) for v in y]
    box = [Interval.around(cv, _radius(v)) for cv, v in zip(center, y)]
    vals = [e.evaluate(dict(zip(names, box))) for e in eqs]
    if all(Interval._wrap(v).contains(0) for v in vals):
        return box
    return None


@lru_cache(maxsize=256)
def _problem(net: ReactionNetwork) -> SteadyStateProblem:
    return SteadyStateProblem(net)


def solve_positive_steady_states(net: ReactionNetwork, kappa: Sequence, c: Sequence | None = None) -> SolveResult:
    return _problem(net).solve(kappa, c)


def hurwitz_data(net: ReactionNetwork, kappa: Sequence, x) -> HurwitzData:
    xs = x.x if isinstance(x, SteadyStateSolution) else [Fraction(v) for v in x]
    return _problem(net).hurwitz_data([Fraction(k) for k in kappa], xs)


def classify_stability(net: ReactionNetwork, kappa: Sequence, x) -> str:
    xs = x.x if isinstance(x, SteadyStateSolution) else [Fraction(v) for v in x]
    return _problem(net).labels([Fraction(k) for k in kappa], xs)[1]


def nondegeneracy(net: ReactionNetwork, kappa: Sequence, x) -> tuple[bool, int, int]:
    """(nondegenerate, sign det Jac_h, sign det Jac_f) at ``x``."""
    xs = x.x if isinstance(x, SteadyStateSolution) else [Fraction(v) for v in x]
    nd, _, sh, sf, _ = _problem(net).labels([Fraction(k) for k in kappa], xs)
    return nd, sh, sf
