"""Mass-action steady-state systems, augmented systems and Jacobians."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from zonet.network.stoich import StoichiometricData
from zonet.symbolic.polynomial import SparsePolynomial, Universe, determinant


@dataclass(frozen=True)
class SteadyStateSystem:
    """f = N v with v_j = kappa_j * prod_i x_i^{Y_ij}."""

    universe: Universe
    f: tuple[SparsePolynomial, ...]
    v: tuple[SparsePolynomial, ...]
    kappa: tuple[str, ...]
    x: tuple[str, ...]


@dataclass(frozen=True)
class AugmentedSystem:
    """f with the rows at the conservation pivots replaced by W x - c."""

    universe: Universe
    h: tuple[SparsePolynomial, ...]
    constants: tuple[str, ...]
    x: tuple[str, ...]


def build_f(sd: StoichiometricData, universe: Universe | None = None) -> SteadyStateSystem:
    s, m = sd.s, sd.m
    if universe is None:
        universe = Universe.standard(m=m, s=s, d=sd.d)
    kappa = tuple(f"kappa{j + 1}" for j in range(m))
    x = tuple(f"x{i + 1}" for i in range(s))
    v = []
    for j in range(m):
        powers = {kappa[j]: 1}
        for i in range(s):
            if sd.Y[i][j]:
                powers[x[i]] = sd.Y[i][j]
        v.append(universe.monomial(powers))
    f = []
    for i in range(s):
        terms: dict = {}
        for j in range(m):
            n = sd.N[i][j]
            if n:
                (e, c), = v[j].terms.items()
                terms[e] = terms.get(e, 0) + n * c
        f.append(SparsePolynomial(universe, terms))
    return SteadyStateSystem(universe, tuple(f), tuple(v), kappa, x)


def build_h(ss: SteadyStateSystem, sd: StoichiometricData) -> AugmentedSystem:
    u = ss.universe
    constants = tuple(f"c{k + 1}" for k in range(sd.d))
    for c in constants:
        if c not in u:
            raise ValueError("universe lacks the total-constant symbols; build f with d set")
    h = list(ss.f)
    for k, (row, lead) in enumerate(zip(sd.W, sd.leading)):
        law = u.zero()
        for i, w in enumerate(row):
            if w:
                law = law + u.var(ss.x[i]) * w
        h[lead] = law - u.var(constants[k])
    return AugmentedSystem(u, tuple(h), constants, ss.x)


def jacobian(polys: Sequence[SparsePolynomial], variables: Sequence[str]) -> list[list[SparsePolynomial]]:
    return [[p.diff(v) for v in variables] for p in polys]


def jacobian_det(polys: Sequence[SparsePolynomial], variables: Sequence[str]) -> SparsePolynomial:
    return determinant(jacobian(polys, variables), polys[0].universe)


def evaluate(poly: SparsePolynomial, assignment: Mapping[str, object]):
    return poly.evaluate({k: Fraction(v) if isinstance(v, (int, str)) else v for k, v in assignment.items()})


def term_sign_profile(poly: SparsePolynomial) -> str:
    """One of ``all-positive``, ``all-negative``, ``mixed`` or ``zero``."""
    return poly.sign_profile()


def parameter_assignment(
    ss: SteadyStateSystem,
    kappa: Sequence | None = None,
    x: Sequence | None = None,
    c: Sequence | None = None,
) -> dict[str, object]:
    out: dict[str, object] = {}
    if kappa is not None:
        out.update(zip(ss.kappa, kappa))
    if x is not None:
        out.update(zip(ss.x, x))
    if c is not None:
        out.update((f"c{k + 1}", v) for k, v in enumerate(c))
    return out
