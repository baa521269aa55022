import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
import sympy

from zonet import linalg
from zonet.fluxcone import extreme_rays
from zonet.lowdim import (
    CATALOG_CLASSES,
    catalog_match,
    classify_conservation_pair,
    degeneracy_verdict,
    is_maximum,
    load_catalog,
    load_example,
    maximal_closure,
    subnetwork_sweep,
    two_species_reduce,
    two_species_verdict,
)
from zonet.network.core import ReactionNetwork, parse_network
from zonet.network.enumeration import reaction_universe
from zonet.network.stoich import stoichiometric_data
from zonet.sign import fast_sign_report, sign_analysis

K = sympy.symbols("kappa1:13")


def _to_sympy(p):
    names = {n: sympy.Symbol(n) for n in p.universe.names}
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[names[n] ** e for n, e in zip(p.universe.names, exp)]) for exp, c in p.terms.items()),
        sympy.Integer(0),
    )


def _two_species(slots):
    return ReactionNetwork(("X1", "X2"), tuple(reaction_universe(2)[k - 1] for k in slots))


def _permuted(net, perm):
    pairs = [
        (tuple(r.reactant.coefficients[p] for p in perm), tuple(r.product.coefficients[p] for p in perm))
        for r in net.reactions
    ]
    return ReactionNetwork.from_pairs(pairs, net.species)


def test_template_coefficients():
    red = two_species_reduce(_two_species(range(1, 13)))
    k = lambda i: K[i - 1]  # noqa: E731
    c1 = (k(10) + k(11)) * (k(8) + k(9)) + (k(7) + k(8)) * (k(10) + k(12))
    c3 = -(k(5) + k(6)) * (k(1) + k(3)) - (k(2) + k(3)) * (k(4) + k(5))
    assert sympy.expand(_to_sympy(red.C1) - c1) == 0
    assert sympy.expand(_to_sympy(red.C3) - c3) == 0
    assert red.coefficients_at([1] * 12)[0] == 8


def test_example3_slots_give_vanishing_outer_coefficients():
    red = two_species_reduce(load_example("example3"))
    assert red.K1 == {1, 2, 3, 10, 11, 12}
    assert red.reduced[0].is_zero() and red.reduced[2].is_zero()
    # kappa in fixture order is slots 1, 2, 3, 10, 11, 12.
    assert two_species_verdict(red, [1, 1, 1, 1, 2, 2]) == "degenerate-continuum"
    assert two_species_verdict(red, [1, 2, 1, 1, 2, 2]) == "no-positive"


def test_reduction_rejects_wrong_shapes():
    with pytest.raises(ValueError):
        two_species_reduce(load_example("example5"))
    with pytest.raises(ValueError):
        two_species_reduce(parse_network("X1 -> X2; X2 -> X1"))


def _oracle_count(net, kappa):
    """Positive steady states via a sympy resultant; None for a continuum."""
    sd = stoichiometric_data(net)
    x1, x2 = sympy.symbols("x1 x2")
    xs = (x1, x2)
    v = [sympy.Rational(kappa[j].numerator, kappa[j].denominator) * sympy.Mul(*[xs[i] ** sd.Y[i][j] for i in range(2)]) for j in range(sd.m)]
    f = [sympy.expand(sum(sd.N[i][j] * v[j] for j in range(sd.m))) for i in range(2)]
    # Monomial factors never vanish on the positive orthant; divide them out.
    f = [sympy.Poly(fi, x1, x2).terms_gcd()[1].as_expr() if fi != 0 else fi for fi in f]
    if any(fi.is_number and fi != 0 for fi in f):
        return 0
    res = sympy.resultant(f[0], f[1], x1)
    if sympy.expand(res) == 0:
        return None
    count = 0
    for root in sympy.Poly(res, x2).real_roots():
        if root <= 0:
            continue
        r2 = root.evalf(50)
        g = sympy.Poly(f[0].subs(x2, r2), x1)
        if g.degree() <= 0:
            continue
        for r1 in sympy.Poly(g, x1).nroots(n=40):
            if abs(sympy.im(r1)) < 1e-30 and sympy.re(r1) > 0 and abs(f[1].subs({x1: sympy.re(r1), x2: r2})) < 1e-25:
                count += 1
    return count


def test_verdict_matches_resultant_oracle():
    rng = random.Random(31)
    verdicts = set()
    checked = 0
    while checked < 500:
        slots = sorted(rng.sample(range(1, 13), rng.randint(2, 7)))
        net = _two_species(slots)
        if stoichiometric_data(net).rank != 2:
            continue
        red = two_species_reduce(net)
        kappa = [Fraction(rng.randint(1, 30), rng.randint(1, 6)) for _ in range(net.m)]
        verdict = two_species_verdict(red, kappa)
        expected = {0: "no-positive", 1: "one-nondegenerate", None: "degenerate-continuum"}[_oracle_count(net, kappa)]
        assert verdict == expected, (slots, kappa)
        verdicts.add(verdict)
        checked += 1
    assert verdicts >= {"no-positive", "one-nondegenerate"}


def test_no_positive_branch_with_vanishing_leading_coefficient():
    rng = random.Random(32)
    hits = 0
    for slots in combinations(range(1, 13), 4):
        net = _two_species(slots)
        if stoichiometric_data(net).rank != 2:
            continue
        red = two_species_reduce(net)
        if not (red.reduced[0].is_zero() and not red.reduced[2].is_zero()):
            continue
        kappa = [Fraction(rng.randint(1, 9)) for _ in range(net.m)]
        c1, c2, c3 = red.coefficients_at(kappa)
        if c2 <= 0 and not red.denominator_vanishes:
            assert c3 < 0
            assert two_species_verdict(red, kappa) == "no-positive"
            assert _oracle_count(net, kappa) == 0
            hits += 1
    assert hits > 0


def test_g1_closure_from_two_generators():
    net = parse_network("X1 + X2 + X3 -> 0; X1 + X2 -> X1 + X3")
    closed = maximal_closure(net)
    assert {r.key for r in closed.reactions} == {r.key for r in load_catalog()["g1"].reactions}


def test_closure_fixed_points_and_subnetwork():
    for name, net in load_catalog().items():
        assert maximal_closure(net).m == net.m, name
        assert is_maximum(net)
    sub = load_example("g21_degenerate_sub")
    assert {r.key for r in maximal_closure(sub).reactions} == {r.key for r in load_catalog()["g21"].reactions}


def test_closure_is_maximum_over_the_whole_universe():
    rng = random.Random(33)
    for _ in range(40):
        idx = rng.sample(range(56), rng.randint(1, 5))
        net = ReactionNetwork(("X1", "X2", "X3"), tuple(reaction_universe(3)[j] for j in idx))
        closed = maximal_closure(net)
        sd = stoichiometric_data(closed)
        assert sd.rank == stoichiometric_data(net).rank
        cols = [sd.column(j) for j in range(sd.m)]
        present = {r.key for r in closed.reactions}
        for rxn in reaction_universe(3):
            if rxn.key in present:
                continue
            col = tuple(b - a for a, b in zip(rxn.reactant.coefficients, rxn.product.coefficients))
            assert linalg.rank(cols + [col]) == sd.rank + 1


def test_catalog_classes_and_pairs():
    half = Fraction(1, 2)
    for name, net in load_catalog().items():
        mc = classify_conservation_pair(stoichiometric_data(net))
        assert mc.cls == CATALOG_CLASSES[name], name
    assert classify_conservation_pair(stoichiometric_data(load_catalog()["g1"])).pair == (half, half)
    assert classify_conservation_pair(stoichiometric_data(load_catalog()["g31"])).pair == (-1, -1)


def test_double_weight_law_is_relabeled_to_half_weights():
    # Columns (1,0,1) and (1,1,-1) are orthogonal to (1,-2,-1): x1 = 2 x2 + x3 + c.
    sd = stoichiometric_data(parse_network("0 -> X1 + X3; X3 -> X1 + X2"))
    mc = classify_conservation_pair(sd)
    assert mc.relabeled
    assert tuple(abs(v) for v in mc.pair) == (Fraction(1, 2), Fraction(1, 2))


def test_class_is_invariant_under_relabeling():
    for name, net in load_catalog().items():
        for perm in permutations(range(3)):
            mc = classify_conservation_pair(stoichiometric_data(_permuted(net, perm)))
            assert mc.cls == CATALOG_CLASSES[name], (name, perm)


def test_isomorphic_catalog_entries():
    assert catalog_match(load_catalog()["g22"]) == "g21"
    assert catalog_match(load_catalog()["g36"]) == "g35"
    assert catalog_match(_permuted(load_catalog()["g33"], (2, 0, 1))) == "g33"
    assert catalog_match(load_example("example5")) is None


def test_degeneracy_verdicts():
    assert degeneracy_verdict(load_example("g21_degenerate_sub")).verdict == "only-degenerate"
    g35 = degeneracy_verdict(load_catalog()["g35"], symbolic=True)
    assert g35.verdict == "nondegenerate-possible" and g35.certified
    assert degeneracy_verdict(parse_network("X1 -> X2; X2 -> X3")).verdict == "no-positive-flux"


def _sweep_oracle(net, symbolic):
    """Classify each subset from scratch: its own rays and sign analysis."""
    counts = {}
    for size in range(1, net.m + 1):
        for subset in combinations(range(net.m), size):
            sub = net.with_reactions(net.reactions[j] for j in subset)
            sd = stoichiometric_data(sub)
            rays = extreme_rays(sd)
            covered = {j for ray in rays.rays for j, v in enumerate(ray) if v}
            if len(covered) != sd.m:
                key = "no-positive-flux"
            elif sd.rank != 2:
                key = "rank-one"
            else:
                rep = sign_analysis(sd, rays)[1] if symbolic else fast_sign_report(sd, rays)
                key = {"zero-polynomial": "only-degenerate"}.get(rep.verdict, rep.verdict)
            counts[key] = counts.get(key, 0) + 1
    return counts


@pytest.mark.parametrize("name,symbolic", [("g1", True), ("g32", True), ("g34", True), ("g31", False), ("g35", False)])
def test_sweep_kernel_matches_subset_by_subset_oracle(name, symbolic):
    net = load_catalog()[name]
    got = {k: v for k, v in subnetwork_sweep(net).outcomes.items() if v}
    assert got == _sweep_oracle(net, symbolic)
