"""Two-dimensional networks: the two-species quadratic reduction, the
conservation-law classes of three-species maximum networks, catalog
fixtures, and degeneracy verdicts with exhaustive subnetwork sweeps.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from zonet import linalg
from zonet.fluxcone import ExtremeRaySet, extreme_rays
from zonet.network.core import ReactionNetwork, parse_network
from zonet.network.enumeration import canonical_form, reaction_universe, universe_indices
from zonet.network.stoich import StoichiometricData, stoichiometric_data
from zonet.sign import SignReport, check_sign_criterion, fast_sign_report, sign_analysis
from zonet.solver.elimination import coefficients_in
from zonet.symbolic.massaction import build_f
from zonet.symbolic.polynomial import SparsePolynomial

log = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Two species


@lru_cache(maxsize=1)
def _template_polynomials():
    """C1, C2, C3, P, Q for the full twelve-reaction template.

    With f1 = P - Q x1 and f2 = A x1 + B, substituting x1 = P / Q into f2
    leaves the numerator -(A P + B Q), a quadratic in x2 whose coefficients
    depend on kappa only.
    """
    template = ReactionNetwork(("X1", "X2"), reaction_universe(2))
    ss = build_f(stoichiometric_data(template))
    f1, f2 = ss.f
    if f1.degree("x1") > 1 or f2.degree("x1") > 1:
        raise AssertionError("template equations must be linear in x1")
    P = f1.subs({"x1": 0})
    Q = -f1.diff("x1")
    A = f2.diff("x1")
    B = f2.subs({"x1": 0})
    numerator = -(A * P + B * Q)
    coeffs = coefficients_in(numerator, "x2")
    coeffs += [numerator.universe.zero()] * (3 - len(coeffs))
    C3, C2, C1 = coeffs[:3]
    return C1, C2, C3, P, Q


@dataclass(frozen=True)
class QuadraticReduction:
    """Steady states of a two-species, rank-two network as roots of a quadratic.

    ``C1``, ``C2``, ``C3`` are the x2^2, x2 and constant coefficients for the
    full template (kappa named by template slot). ``slots[k]`` is the
    network's reaction index sitting in template slot ``k`` (or None) and
    ``K1`` the 1-based present slots. The ``reduced`` coefficients have the
    absent rates set to zero.
    """

    network: ReactionNetwork
    C1: SparsePolynomial
    C2: SparsePolynomial
    C3: SparsePolynomial
    slots: tuple[int | None, ...]
    K1: frozenset[int]
    reduced: tuple[SparsePolynomial, SparsePolynomial, SparsePolynomial]
    numerator_x1: SparsePolynomial
    denominator_x1: SparsePolynomial

    @property
    def denominator_vanishes(self) -> bool:
        return self.denominator_x1.is_zero()

    def template_kappa(self, kappa: Sequence) -> dict[str, Fraction]:
        if len(kappa) != self.network.m:
            raise ValueError(f"expected {self.network.m} rate constants")
        return {
            f"kappa{k + 1}": (Fraction(kappa[j]) if j is not None else Fraction(0))
            for k, j in enumerate(self.slots)
        }

    def coefficients_at(self, kappa: Sequence) -> tuple[Fraction, Fraction, Fraction]:
        values = self.template_kappa(kappa)
        return tuple(c.evaluate(values) for c in self.reduced)


def two_species_reduce(net: ReactionNetwork) -> QuadraticReduction:
    if net.s != 2 or not net.zero_one:
        raise ValueError("the quadratic reduction needs a two-species zero-one network")
    sd = stoichiometric_data(net)
    if sd.rank != 2:
        raise ValueError(f"the quadratic reduction needs rank 2, got rank {sd.rank}")
    C1, C2, C3, P, Q = _template_polynomials()
    where = {k: j for j, k in enumerate(universe_indices(net))}
    slots = tuple(where.get(k) for k in range(12))
    absent = {f"kappa{k + 1}": 0 for k, j in enumerate(slots) if j is None}
    reduced = tuple(c.subs(absent) for c in (C1, C2, C3))
    return QuadraticReduction(
        net, C1, C2, C3, slots,
        frozenset(k + 1 for k, j in enumerate(slots) if j is not None),
        reduced, P.subs(absent), Q.subs(absent),
    )


def two_species_verdict(red: QuadraticReduction, kappa: Sequence) -> str:
    """``no-positive``, ``one-nondegenerate`` or ``degenerate-continuum``.

    Follows the sign split on the reduced coefficients: C1 > 0 whenever it
    is not the zero polynomial, and C3 < 0 likewise.
    """
    values = red.template_kappa(kappa)
    if any(v <= 0 for k, v in values.items() if red.slots[int(k[5:]) - 1] is not None):
        raise ValueError("rate constants must be positive")
    if red.denominator_x1.is_zero() or red.numerator_x1.is_zero():
        # f1 is then P > 0 or -Q x1 < 0 on the positive orthant.
        return "no-positive"
    c1p, c2p, c3p = red.reduced
    c1, c2, c3 = (p.evaluate(values) for p in red.reduced)
    if not c1p.is_zero():
        if not c3p.is_zero():
            return "one-nondegenerate"  # c1 > 0 > c3: roots of opposite sign
        return "one-nondegenerate" if c2 < 0 else "no-positive"
    if not c3p.is_zero():
        return "one-nondegenerate" if c2 > 0 else "no-positive"
    return "degenerate-continuum" if c2 == 0 else "no-positive"


# ---------------------------------------------------------------------------
# Maximum networks on three species


def maximal_closure(net: ReactionNetwork) -> ReactionNetwork:
    """Add every zero-one reaction whose column lies in the span of N."""
    if not net.zero_one:
        raise ValueError("maximal closure is defined for zero-one networks")
    sd = stoichiometric_data(net)
    cols = [sd.column(j) for j in range(sd.m)]
    present = set(r.key for r in net.reactions)
    extra = []
    for rxn in reaction_universe(net.s):
        if rxn.key in present:
            continue
        col = tuple(b - a for a, b in zip(rxn.reactant.coefficients, rxn.product.coefficients))
        if linalg.rank(cols + [col]) == sd.rank:
            extra.append(rxn)
    return net.with_reactions(net.reactions + tuple(extra))


def is_maximum(net: ReactionNetwork) -> bool:
    return maximal_closure(net).m == net.m


@dataclass(frozen=True)
class MaximumClass:
    """Conservation law x_solve = a x_j + b x_k + c after relabeling.

    ``permutation`` lists the original 0-based species in the order
    (solve, j, k). ``cls`` is G1, G2, G3 or not-maximum.
    """

    pair: tuple[Fraction, Fraction]
    cls: str
    catalog_id: str | None
    permutation: tuple[int, int, int]
    relabeled: bool

    def to_json(self) -> dict:
        return {
            "a": str(self.pair[0]),
            "b": str(self.pair[1]),
            "class": self.cls,
            "catalog_id": self.catalog_id,
            "permutation": [i + 1 for i in self.permutation],
            "relabeled": self.relabeled,
        }


def conservation_pair(sd: StoichiometricData) -> tuple[tuple[Fraction, Fraction], tuple[int, int, int], bool]:
    """(a, b), the species order and whether the half-weight relabeling was used."""
    if sd.s != 3 or sd.rank != 2:
        raise ValueError("conservation pairs are defined for three species at rank 2")
    w = sd.W[0]
    # Prefer solving for X1 against rows 2 and 3; if those rows are
    # dependent, use the first independent pair of rows instead.
    if w[0] != 0:
        order = (0, 1, 2)
    elif w[2] != 0:
        order = (2, 0, 1)
    else:
        order = (1, 0, 2)
    sol, j, k = order
    a, b = -w[j] / w[sol], -w[k] / w[sol]
    relabeled = False
    if (abs(a), abs(b)) == (2, 1):
        order, (a, b) = (j, sol, k), (1 / a, -b / a)
        relabeled = True
    elif (abs(a), abs(b)) == (1, 2):
        order, (a, b) = (k, sol, j), (1 / b, -a / b)
        relabeled = True
    if relabeled:
        log.debug("relabeled species to %s for a half-weight conservation law", order)
    return (a, b), order, relabeled


def classify_conservation_pair(sd: StoichiometricData) -> MaximumClass:
    (a, b), order, relabeled = conservation_pair(sd)
    net = sd.network
    if not is_maximum(net):
        return MaximumClass((a, b), "not-maximum", None, order, relabeled)
    half = Fraction(1, 2)
    if (a, b) == (half, half):
        cls = "G1"
    elif (a, b) in ((1, 0), (0, 1), (0, 0)):
        cls = "G2"
    else:
        cls = "G3"
    return MaximumClass((a, b), cls, catalog_match(net), order, relabeled)


# ---------------------------------------------------------------------------
# Catalog fixtures


CATALOG_CLASSES = {
    "g1": "G1",
    "g21": "G2", "g22": "G2", "g23": "G2",
    "g31": "G3", "g32": "G3", "g33": "G3", "g34": "G3", "g35": "G3", "g36": "G3",
}


def _data_text(folder: str, name: str) -> str:
    return resources.files("zonet").joinpath("data", folder, f"{name}.net").read_text()


@lru_cache(maxsize=None)
def load_catalog() -> dict[str, ReactionNetwork]:
    """The bundled maximum networks, keyed g1, g21, ..., g36."""
    return {name: parse_network(_data_text("catalog", name)) for name in CATALOG_CLASSES}


def example_names() -> list[str]:
    folder = resources.files("zonet").joinpath("data", "examples")
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".net"))


@lru_cache(maxsize=None)
def load_example(name: str) -> ReactionNetwork:
    return parse_network(_data_text("examples", name))


@lru_cache(maxsize=1)
def _catalog_forms() -> dict:
    forms: dict = {}
    for name, net in load_catalog().items():
        # g22 and g36 repeat g21 and g35 up to relabeling; keep the first name.
        forms.setdefault(canonical_form(net).reactions, name)
    return forms


def catalog_match(net: ReactionNetwork) -> str | None:
    """Name of the catalog network isomorphic to ``net``, if any."""
    if net.s != 3 or not net.zero_one:
        return None
    return _catalog_forms().get(canonical_form(net).reactions)


# ---------------------------------------------------------------------------
# Degeneracy


@dataclass(frozen=True)
class DegeneracyVerdict:
    """``verdict`` is only-degenerate, nondegenerate-possible or no-positive-flux.

    ``certified`` is True when the sign criterion proves det Jac_h > 0 at
    every positive steady state.
    """

    verdict: str
    report: SignReport
    rays: ExtremeRaySet

    @property
    def certified(self) -> bool:
        return self.report.verdict == "positive-certified"

    @property
    def outcome(self) -> str:
        """The sweep outcome: only-degenerate, no-positive-flux, positive-certified or inconclusive."""
        if self.verdict == "nondegenerate-possible":
            return self.report.verdict
        return self.verdict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "sign": self.report.to_json(), "rays": [list(r) for r in self.rays.rays]}


_FROM_SIGN = {
    "no-positive-flux": "no-positive-flux",
    "zero-polynomial": "only-degenerate",
    "positive-certified": "nondegenerate-possible",
    "inconclusive": "nondegenerate-possible",
}


def degeneracy_verdict(
    net: ReactionNetwork | StoichiometricData,
    rays: ExtremeRaySet | None = None,
    symbolic: bool = False,
) -> DegeneracyVerdict:
    sd = net if isinstance(net, StoichiometricData) else stoichiometric_data(net)
    if sd.s != 3 or sd.rank != 2:
        raise ValueError("degeneracy verdicts are defined for three species at rank 2")
    if rays is None:
        rays = extreme_rays(sd)
    if symbolic:
        report = check_sign_criterion(sign_analysis(sd, rays)[0]) if rays.t else fast_sign_report(sd, rays)
    else:
        report = fast_sign_report(sd, rays)
    return DegeneracyVerdict(_FROM_SIGN[report.verdict], report, rays)


def _sub_data(sd: StoichiometricData, subset: Sequence[int]) -> StoichiometricData:
    net = sd.network
    return stoichiometric_data(net.with_reactions(net.reactions[j] for j in subset))


def flux_unions(rays: ExtremeRaySet) -> list[frozenset[int]]:
    """Every nonempty union of ray supports: exactly the subnetworks with positive flux."""
    supports = {rays.support(k) for k in range(rays.t)}
    unions: set[frozenset[int]] = set()
    for sup in sorted(supports, key=sorted):
        unions |= {u | sup for u in unions} | {sup}
    return sorted(unions, key=lambda u: (len(u), sorted(u)))


OUTCOMES = ("no-positive-flux", "rank-one", "only-degenerate", "positive-certified", "inconclusive")


@dataclass
class SweepResult:
    """Outcome counts over all nonempty reaction subsets of a network.

    ``rank-one`` counts subsets with positive flux whose stoichiometric
    matrix has rank one (they are not two-dimensional). Subsets in
    ``inconclusive`` are 0-based reaction index tuples.
    """

    network: ReactionNetwork
    outcomes: Counter
    inconclusive: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def subsets_total(self) -> int:
        return 2 ** self.network.m - 1

    def to_json(self) -> dict:
        return {
            "subsets_total": self.subsets_total,
            "outcomes": {k: self.outcomes.get(k, 0) for k in OUTCOMES},
            "inconclusive": [[j + 1 for j in s] for s in self.inconclusive],
        }


def _words(bits: Sequence[int], t: int):
    import numpy as np

    out = np.zeros(max(1, (t + 63) // 64), dtype=np.uint64)
    for k in bits:
        out[k // 64] |= np.uint64(1) << np.uint64(k % 64)
    return out


def _sweep_tables(sd: StoichiometricData, rays: ExtremeRaySet):
    """Bit tables for the subset sweep.

    A subnetwork's rays are the parent rays supported inside it, so its
    lambda coefficients are submatrices of the parent's ray-pair blocks.
    """
    import numpy as np

    from zonet.sign import b_structure

    m, t = sd.m, rays.t
    st = b_structure(sd.N, sd.Y, rays)
    theta = st.theta()
    adjacent = np.zeros((t, t), dtype=bool)
    for M in st.blocks.values():
        adjacent |= (M + M.T) != 0
    np.fill_diagonal(adjacent, False)
    nw = max(1, (t + 63) // 64)
    supp = np.array([sum(1 << j for j in rays.support(k)) for k in range(t)], dtype=np.int64)
    nbr = np.stack([_words(np.nonzero(adjacent[k])[0], t) for k in range(t)]) if t else np.zeros((0, nw), np.uint64)
    theta_w = _words(theta, t)
    ray_lists = [sorted(rays.reaction_rays[i]) for i in range(m)]
    width = max((len(x) for x in ray_lists), default=0)
    q_idx = np.full((m, max(1, width)), -1, dtype=np.int64)
    for i, lst in enumerate(ray_lists):
        q_idx[i, : len(lst)] = lst
    cols = [sd.column(j) for j in range(m)]
    lines = np.array(
        [sum(1 << j2 for j2 in range(m) if linalg.rank([cols[j], cols[j2]]) == 1) for j in range(m)],
        dtype=np.int64,
    )
    return supp, nbr, theta_w, q_idx, lines


def _sweep_kernel(m, t, supp, nbr, theta_w, q_idx, lines, counts, bad, max_bad):
    """Classify every nonempty subset S of the m reactions (bit masks).

    counts: [no-positive-flux, rank-one, only-degenerate, positive-certified,
    inconclusive]. The first ``max_bad`` inconclusive masks go to ``bad``.
    """
    nw = theta_w.shape[0]
    inside = np.zeros(nw, dtype=np.uint64)
    keep = np.zeros(nw, dtype=np.uint64)
    acc = np.zeros(nw, dtype=np.uint64)
    qt = np.zeros((m, nw), dtype=np.uint64)
    members = np.zeros(m, dtype=np.int64)
    one = np.uint64(1)
    nbad = 0
    for S in range(1, 1 << m):
        for w in range(nw):
            inside[w] = 0
        cover = 0
        for k in range(t):
            if supp[k] & ~S == 0:
                inside[k >> 6] |= one << np.uint64(k & 63)
                cover |= supp[k]
        if cover != S:
            counts[0] += 1
            continue
        low = 0
        while not (S >> low) & 1:
            low += 1
        if S & ~lines[low] == 0:
            counts[1] += 1
            continue
        # Zero polynomial: no squared ray inside and no adjacent pair inside.
        zero = True
        for w in range(nw):
            keep[w] = inside[w] & ~theta_w[w]
            if inside[w] & theta_w[w]:
                zero = False
        if zero:
            for k in range(t):
                if (inside[k >> 6] >> np.uint64(k & 63)) & one:
                    for w in range(nw):
                        if nbr[k, w] & inside[w]:
                            zero = False
                            break
                    if not zero:
                        break
        if zero:
            counts[2] += 1
            continue
        n = 0
        for i in range(m):
            if (S >> i) & 1:
                members[n] = i
                n += 1
                for w in range(nw):
                    qt[i, w] = 0
                for a in range(q_idx.shape[1]):
                    k = q_idx[i, a]
                    if k < 0:
                        break
                    if (keep[k >> 6] >> np.uint64(k & 63)) & one:
                        qt[i, k >> 6] |= one << np.uint64(k & 63)
        found = False
        for ai in range(n):
            i = members[ai]
            for w in range(nw):
                acc[w] = ~np.uint64(0)
            for a in range(q_idx.shape[1]):
                k = q_idx[i, a]
                if k < 0:
                    break
                if (qt[i, k >> 6] >> np.uint64(k & 63)) & one:
                    for w in range(nw):
                        acc[w] &= nbr[k, w]
            for aj in range(ai, n):
                j = members[aj]
                ok = True
                for w in range(nw):
                    if qt[j, w] & ~acc[w]:
                        ok = False
                        break
                if ok:
                    found = True
                    break
            if found:
                break
        if found:
            counts[3] += 1
        else:
            counts[4] += 1
            if nbad < max_bad:
                bad[nbad] = S
            nbad += 1
    return nbad


try:
    import numba
    import numpy as np

    _sweep_compiled = numba.njit(cache=False)(_sweep_kernel)
except ImportError:  # pragma: no cover - numba is a declared dependency
    import numpy as np

    _sweep_compiled = _sweep_kernel


def subnetwork_sweep(net: ReactionNetwork, max_reported: int = 1000) -> SweepResult:
    """Degeneracy outcomes for every nonempty subset of the reactions of ``net``.

    A subset has a strictly positive flux iff it is covered by the parent
    rays it contains. Rank-two subsets with positive flux get the
    only-degenerate / positive-certified / inconclusive outcome of the
    sign criterion.
    """
    sd = stoichiometric_data(net)
    if sd.rank != 2:
        raise ValueError("the subnetwork sweep is defined for rank-two networks")
    if net.m > 40:
        raise ValueError("too many reactions for an exhaustive subset sweep")
    rays = extreme_rays(sd)
    tables = _sweep_tables(sd, rays)
    counts = np.zeros(5, dtype=np.int64)
    bad = np.zeros(max_reported, dtype=np.int64)
    nbad = _sweep_compiled(net.m, rays.t, *tables, counts, bad, max_reported)
    outcomes = Counter({name: int(c) for name, c in zip(OUTCOMES, counts)})
    inconclusive = [tuple(j for j in range(net.m) if (int(S) >> j) & 1) for S in bad[: min(nbad, max_reported)]]
    return SweepResult(net, outcomes, inconclusive)


def subnetwork_sweep_direct(net: ReactionNetwork) -> SweepResult:
    """The same sweep subnetwork by subnetwork through :func:`degeneracy_verdict`.

    Slow; used to cross-check :func:`subnetwork_sweep` on small networks.
    """
    sd = stoichiometric_data(net)
    rays = extreme_rays(sd)
    unions = flux_unions(rays)
    outcomes = Counter({"no-positive-flux": 2 ** net.m - 1 - len(unions)})
    bad = []
    for u in unions:
        subset = tuple(sorted(u))
        if linalg.rank([sd.column(j) for j in subset]) != 2:
            outcomes["rank-one"] += 1
            continue
        verdict = degeneracy_verdict(_sub_data(sd, subset), rays.restrict(subset))
        outcomes[verdict.outcome] += 1
        if verdict.outcome == "inconclusive":
            bad.append(subset)
    return SweepResult(net, outcomes, bad)
