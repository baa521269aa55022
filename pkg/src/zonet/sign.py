"""Transformed Jacobian J(p, lambda), its principal-minor sum B, and the
sign certificate for det Jac_h at positive steady states.

At a positive steady state x with flux v = sum_k lambda_k R^(k), the
Jacobian of f equals J(1/x, lambda). The certificate works on the
polynomial B = sum of 2x2 principal minors of J.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from zonet.fluxcone import ExtremeRaySet, strictly_positive_flux_exists
from zonet.network.stoich import StoichiometricData
from zonet.symbolic.massaction import SteadyStateSystem, jacobian_det
from zonet.symbolic.polynomial import SparsePolynomial, Universe, determinant, poly_sum


@dataclass(frozen=True)
class TransformedJacobian:
    universe: Universe
    J: tuple[tuple[SparsePolynomial, ...], ...]
    p: tuple[str, ...]
    lam: tuple[str, ...]


@dataclass(frozen=True)
class BPolynomialBundle:
    B: SparsePolynomial
    theta: frozenset[int]
    B_tilde: SparsePolynomial
    q: tuple[frozenset[int], ...]
    q_tilde: tuple[frozenset[int], ...]
    t: int
    positive_flux: bool


@dataclass(frozen=True)
class SignReport:
    """Verdict of the pair search.

    ``verdict`` is ``positive-certified``, ``zero-polynomial``,
    ``no-positive-flux`` or ``inconclusive``. Indices in ``witness_pair`` and
    ``witness_set`` are 0-based reaction and ray positions.
    """

    verdict: str
    witness_pair: tuple[int, int] | None
    witness_set: tuple[tuple[int, int], ...] = ()
    b_terms: int = 0
    b_tilde_terms: int = 0
    theta_size: int = 0
    t: int = 0
    diagonal_pairs_blocked: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness_pair": None if self.witness_pair is None else [i + 1 for i in self.witness_pair],
            "witness_set": [[k + 1, l + 1] for k, l in self.witness_set],
            "b_terms": self.b_terms,
            "b_tilde_terms": self.b_tilde_terms,
            "theta_size": self.theta_size,
            "t": self.t,
            "diagonal_pairs_blocked": self.diagonal_pairs_blocked,
        }


def build_transformed_jacobian(sd: StoichiometricData, rays: ExtremeRaySet) -> TransformedJacobian:
    s, m, t = sd.s, sd.m, rays.t
    u = Universe.standard(p=s, t=t)
    p = tuple(f"p{i + 1}" for i in range(s))
    lam = tuple(f"lambda{k + 1}" for k in range(t))
    gamma = []
    for j in range(m):
        gamma.append(poly_sum((u.var(lam[k]) * rays.rays[k][j] for k in range(t) if rays.rays[k][j]), u))
    J = []
    for a in range(s):
        row = []
        for b in range(s):
            entry = poly_sum((gamma[j] * (sd.N[a][j] * sd.Y[b][j]) for j in range(m) if sd.N[a][j] and sd.Y[b][j]), u)
            row.append(entry * u.var(p[b]) if entry else entry)
        J.append(tuple(row))
    return TransformedJacobian(u, tuple(J), p, lam)


def principal_minor_sum(J: Sequence[Sequence[SparsePolynomial]], order: int, universe: Universe) -> SparsePolynomial:
    total = universe.zero()
    for idx in combinations(range(len(J)), order):
        total = total + determinant([[J[a][b] for b in idx] for a in idx], universe)
    return total


def build_B_bundle(J: TransformedJacobian, rays: ExtremeRaySet) -> BPolynomialBundle:
    u = J.universe
    B = principal_minor_sum(J.J, 2, u)
    lam_pos = [u.index[name] for name in J.lam]
    theta = frozenset(k for k, pos in enumerate(lam_pos) if any(e[pos] >= 2 for e in B.terms))
    theta_pos = [lam_pos[k] for k in theta]
    B_tilde = SparsePolynomial(u, {e: c for e, c in B.terms.items() if not any(e[i] for i in theta_pos)})
    q = rays.reaction_rays
    q_tilde = tuple(qi - theta for qi in q)
    return BPolynomialBundle(B, theta, B_tilde, q, q_tilde, rays.t, strictly_positive_flux_exists(rays))


def _pair_search(
    m: int,
    q_tilde: Sequence[frozenset[int]],
    divides: set[tuple[int, int]],
) -> tuple[tuple[int, int] | None, tuple[tuple[int, int], ...], bool]:
    """Return the first (i, j), i <= j, whose products all divide a B-tilde term.

    A product with k == l needs a squared lambda, which B-tilde never has, so
    such pairs block the witness. The third value reports whether ignoring
    those diagonal products would have produced a witness when none was found.
    """
    blocked = False
    for i in range(m):
        for j in range(i, m):
            prods = set()
            ok = True
            diag_only = True
            for k in q_tilde[i]:
                for l in q_tilde[j]:
                    key = (min(k, l), max(k, l))
                    prods.add(key)
                    if k == l:
                        ok = False
                    elif key not in divides:
                        ok = False
                        diag_only = False
            if ok:
                return (i, j), tuple(sorted(prods)), False
            if diag_only:
                blocked = True
    return None, (), blocked


def check_sign_criterion(bundle: BPolynomialBundle, use_full_B: bool = False) -> SignReport:
    """Search for a reaction pair certifying B > 0 at positive steady states.

    By default the reduced polynomial B-tilde and the reduced ray sets are
    used; ``use_full_B`` runs the same search on B and the unreduced sets.
    """
    counts = dict(
        b_terms=len(bundle.B),
        b_tilde_terms=len(bundle.B_tilde),
        theta_size=len(bundle.theta),
        t=bundle.t,
    )
    if not bundle.positive_flux:
        return SignReport("no-positive-flux", None, **counts)
    if bundle.B.is_zero():
        return SignReport("zero-polynomial", None, **counts)
    u = bundle.B.universe
    lam_pos = [u.index[f"lambda{k + 1}"] for k in range(bundle.t)]
    poly = bundle.B if use_full_B else bundle.B_tilde
    sets = bundle.q if use_full_B else bundle.q_tilde
    divides: set[tuple[int, int]] = set()
    for e in poly.terms:
        present = [k for k, pos in enumerate(lam_pos) if e[pos]]
        for a, b in combinations(present, 2):
            divides.add((a, b))
    if use_full_B:
        # In the full polynomial a squared lambda can divide a term.
        squares = {k for k, pos in enumerate(lam_pos) if any(e[pos] >= 2 for e in poly.terms)}
        divides |= {(k, k) for k in squares}
        witness, prods, blocked = _pair_search_full(len(sets), sets, divides)
    else:
        witness, prods, blocked = _pair_search(len(sets), sets, divides)
    if witness is None:
        return SignReport("inconclusive", None, diagonal_pairs_blocked=blocked, **counts)
    return SignReport("positive-certified", witness, prods, **counts)


def _pair_search_full(m, q, divides):
    for i in range(m):
        for j in range(i, m):
            prods = {(min(k, l), max(k, l)) for k in q[i] for l in q[j]}
            if all(pr in divides for pr in prods):
                return (i, j), tuple(sorted(prods)), False
    return None, (), False


def sign_analysis(sd: StoichiometricData, rays: ExtremeRaySet) -> tuple[BPolynomialBundle, SignReport]:
    J = build_transformed_jacobian(sd, rays)
    bundle = build_B_bundle(J, rays)
    return bundle, check_sign_criterion(bundle)


# ---------------------------------------------------------------------------
# Integer route for B via Cauchy-Binet. Each 2x2 principal minor of
# N diag(gamma) Y^T splits into products det N[I,K] det Y[I,K] gamma_K, so the
# lambda-coefficients of B come from R^T C_I R with small integer matrices.
# Used for bulk sweeps and as an independent check of the symbolic route.


@dataclass(frozen=True)
class BStructure:
    blocks: dict[tuple[int, int], np.ndarray]
    t: int

    def term_count(self, drop: frozenset[int] = frozenset()) -> int:
        keep = np.array([k not in drop for k in range(self.t)], dtype=bool)
        total = 0
        for M in self.blocks.values():
            S = M + M.T
            sub = S[np.ix_(keep, keep)]
            total += int(np.count_nonzero(np.triu(sub, 1))) + int(np.count_nonzero(np.diag(M)[keep]))
        return total

    def theta(self) -> frozenset[int]:
        out = set()
        for M in self.blocks.values():
            out.update(int(k) for k in np.nonzero(np.diag(M))[0])
        return frozenset(out)

    def is_zero(self) -> bool:
        # M itself may be nonzero while every coefficient M + M^T, diag(M) vanishes.
        return self.term_count() == 0

    def cross_pairs(self, drop: frozenset[int]) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for M in self.blocks.values():
            S = M + M.T
            for a, b in zip(*np.nonzero(np.triu(S, 1))):
                a, b = int(a), int(b)
                if a not in drop and b not in drop:
                    out.add((a, b))
        return out


def b_structure(N: Sequence[Sequence[int]], Y: Sequence[Sequence[int]], rays: ExtremeRaySet) -> BStructure:
    s, m, t = len(N), rays.m, rays.t
    Nn = np.array(N, dtype=np.int64).reshape(s, m)
    Yn = np.array(Y, dtype=np.int64).reshape(s, m)
    R = np.array(rays.rays, dtype=np.int64).reshape(t, m).T  # m x t
    blocks = {}
    for a, b in combinations(range(s), 2):
        dn = np.outer(Nn[a], Nn[b]) - np.outer(Nn[b], Nn[a])
        dy = np.outer(Yn[a], Yn[b]) - np.outer(Yn[b], Yn[a])
        C = np.triu(dn * dy, 1)
        blocks[(a, b)] = R.T @ C @ R
    return BStructure(blocks, t)


def fast_sign_report(sd: StoichiometricData, rays: ExtremeRaySet) -> SignReport:
    """Same verdict as :func:`check_sign_criterion` without building polynomials."""
    st = b_structure(sd.N, sd.Y, rays)
    theta = st.theta()
    counts = dict(
        b_terms=st.term_count(),
        b_tilde_terms=st.term_count(theta),
        theta_size=len(theta),
        t=rays.t,
    )
    if not strictly_positive_flux_exists(rays):
        return SignReport("no-positive-flux", None, **counts)
    if st.is_zero():
        return SignReport("zero-polynomial", None, **counts)
    q_tilde = tuple(qi - theta for qi in rays.reaction_rays)
    witness, prods, blocked = _pair_search(rays.m, q_tilde, st.cross_pairs(theta))
    if witness is None:
        return SignReport("inconclusive", None, diagonal_pairs_blocked=blocked, **counts)
    return SignReport("positive-certified", witness, prods, **counts)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InjectivityResult:
    verdict: str  # "injective" or "undetermined"
    screen: str | None
    profiles: dict


def injectivity_screen(ss: SteadyStateSystem, sd: StoichiometricData | None = None) -> InjectivityResult:
    """Term-sign screens on det Jac_f and det(E - Jac_f).

    For networks with conservation laws det Jac_f vanishes identically; the
    screen then inspects det Jac_h instead, which needs ``sd``.
    """
    u = ss.universe
    x = list(ss.x)
    s = len(x)
    if sd is not None and sd.d > 0:
        from zonet.symbolic.massaction import build_h

        aug = build_h(ss, sd)
        prof = jacobian_det(aug.h, x).sign_profile()
        profiles = {"det_jac_h": prof}
        if prof in ("all-positive", "all-negative"):
            return InjectivityResult("injective", "det_jac_h", profiles)
        return InjectivityResult("undetermined", None, profiles)
    prof_f = jacobian_det(ss.f, x).sign_profile()
    profiles = {"det_jac_f": prof_f}
    if prof_f in ("all-positive", "all-negative"):
        return InjectivityResult("injective", "det_jac_f", profiles)
    g = [u.var(x[i]) - ss.f[i] for i in range(s)]
    prof_g = jacobian_det(g, x).sign_profile()
    profiles["det_jac_x_minus_f"] = prof_g
    if prof_g in ("all-positive", "all-negative"):
        return InjectivityResult("injective", "det_jac_x_minus_f", profiles)
    return InjectivityResult("undetermined", None, profiles)


def low_rank_jacobian_signs(sd: StoichiometricData, J: TransformedJacobian) -> str:
    """Check the coefficient signs behind sign(det Jac_h) = (-1)^r for r <= 2.

    Diagonal entries of J must have only non-positive coefficients and 2x2
    principal minors only non-negative ones. Returns ``consistent``,
    ``violation`` or ``not-applicable`` (r >= 3).
    """
    s = sd.s
    for a in range(s):
        if J.J[a][a].sign_profile() not in ("zero", "all-negative"):
            return "violation"
    if sd.rank >= 2:
        for a, b in combinations(range(s), 2):
            minor = J.J[a][a] * J.J[b][b] - J.J[a][b] * J.J[b][a]
            if minor.sign_profile() not in ("zero", "all-positive"):
                return "violation"
    if sd.rank >= 3:
        return "not-applicable"
    return "consistent"


def minor_sum_is_zero(sd: StoichiometricData, rays: ExtremeRaySet, seed: int = 0) -> bool:
    """Is the sum of the r x r principal minors of J(p, lambda) the zero polynomial?

    A nonzero value at a random integer point settles the question exactly;
    only a zero value falls back on the symbolic expansion.
    """
    import random

    r = sd.rank
    if rays.t == 0 or r == 0:
        return rays.t == 0
    rng = random.Random(seed)
    lam = [rng.randint(1, 1 << 20) for _ in range(rays.t)]
    p = [rng.randint(1, 1 << 20) for _ in range(sd.s)]
    gamma = [sum(lam[k] * rays.rays[k][j] for k in range(rays.t)) for j in range(sd.m)]
    J = [
        [sum(sd.N[a][j] * gamma[j] * sd.Y[b][j] for j in range(sd.m)) * p[b] for b in range(sd.s)]
        for a in range(sd.s)
    ]
    from zonet.linalg import det

    value = sum(det([[J[a][b] for b in idx] for a in idx]) for idx in combinations(range(sd.s), r))
    if value != 0:
        return False
    tj = build_transformed_jacobian(sd, rays)
    return principal_minor_sum(tj.J, r, tj.universe).is_zero()
