import random
from fractions import Fraction

from hypothesis import given, settings

from conftest import random_network, random_rational, zero_one_networks
from zonet.lowdim import load_catalog, load_example
from zonet.network.core import parse_network
from zonet.network.stoich import stoichiometric_data
from zonet.symbolic.massaction import (
    build_f,
    build_h,
    evaluate,
    jacobian,
    jacobian_det,
    parameter_assignment,
    term_sign_profile,
)
from zonet.symbolic.polynomial import Universe


def _system(name_or_net):
    net = load_example(name_or_net) if isinstance(name_or_net, str) else name_or_net
    sd = stoichiometric_data(net)
    return sd, build_f(sd)


def _poly(u: Universe, terms):
    """Sum of coeff * monomial for (coeff, {name: power}) pairs."""
    out = u.zero()
    for coeff, powers in terms:
        out = out + u.monomial(powers, coeff)
    return out


def test_example3_first_equation():
    sd, ss = _system("example3")
    # Reaction order in the fixture is template slots 1, 2, 3, 10, 11, 12.
    u = ss.universe
    k = {slot: f"kappa{j + 1}" for j, slot in enumerate((1, 2, 3, 10, 11, 12))}
    expected = _poly(u, [
        (-1, {k[10]: 1, "x1": 1, "x2": 1}),
        (-1, {k[12]: 1, "x1": 1, "x2": 1}),
        (1, {k[1]: 1}),
        (1, {k[3]: 1}),
    ])
    assert ss.f[0] == expected


def test_example5_third_equation():
    _, ss = _system("example5")
    expected = _poly(ss.universe, [
        (1, {"kappa1": 1, "x1": 1, "x2": 1}),
        (-1, {"kappa2": 1, "x3": 1}),
        (1, {"kappa3": 1}),
    ])
    assert ss.f[2] == expected


def test_single_reaction_system():
    _, ss = _system(parse_network("X1 -> X2"))
    u = ss.universe
    assert ss.f[0] == -u.monomial({"kappa1": 1, "x1": 1})
    assert ss.f[1] == u.monomial({"kappa1": 1, "x1": 1})


def test_g1_first_augmented_equation():
    sd = stoichiometric_data(load_catalog()["g1"])
    aug = build_h(build_f(sd), sd)
    u = aug.universe
    assert aug.h[0] == u.var("x1") - u.var("x2") * Fraction(1, 2) - u.var("x3") * Fraction(1, 2) - u.var("c1")
    assert aug.h[1:] == build_f(sd).f[1:]


def test_full_rank_augmented_system_is_f():
    sd, ss = _system("example5")
    assert build_h(ss, sd).h == ss.f


def test_example2_augmented_system_has_two_conservation_rows():
    sd, ss = _system("example2")
    aug = build_h(ss, sd)
    u = aug.universe
    # x1 = -x3 + c1 and x2 = x3 + c2
    assert aug.h[0] == u.var("x1") + u.var("x3") - u.var("c1")
    assert aug.h[1] == u.var("x2") - u.var("x3") - u.var("c2")
    assert aug.h[2] == ss.f[2]


def test_jacobian_entry_by_product_rule():
    _, ss = _system("example3")
    u = ss.universe
    term = -u.monomial({"kappa4": 1, "x1": 1, "x2": 1})
    assert jacobian([term], ["x1"])[0][0] == -u.monomial({"kappa4": 1, "x2": 1})


def test_example3_jacobian_determinant_vanishes():
    _, ss = _system("example3")
    det = jacobian_det(ss.f, ss.x)
    assert det.is_zero()
    assert term_sign_profile(det) == "zero"


def test_g1_jacobian_determinant_identity():
    sd = stoichiometric_data(load_catalog()["g1"])
    ss = build_f(sd)
    det = jacobian_det(build_h(ss, sd).h, ss.x)
    k = lambda j: f"kappa{j}"  # noqa: E731
    inner = [
        (2, {k(3): 1, "x1": 2, "x2": 1}), (1, {k(3): 1, "x1": 1, "x2": 2}),
        (2, {k(4): 1, "x1": 2, "x3": 1}), (1, {k(4): 1, "x1": 1, "x3": 2}),
        (2, {k(5): 1, "x1": 1, "x2": 1}), (1, {k(5): 1, "x2": 1, "x3": 1}),
        (2, {k(6): 1, "x1": 1, "x3": 1}), (1, {k(6): 1, "x2": 1, "x3": 1}),
    ]
    expected = ss.universe.var(k(1)) * _poly(ss.universe, inner)
    assert det == expected
    assert term_sign_profile(det) == "all-positive"


def test_example5_witness_points_are_exact_steady_states():
    _, ss = _system("example5")
    kappa = (1, 3, 2, 1, 1)
    for x in ((1, 1, 1), (2, 2, 2)):
        values = [evaluate(fi, parameter_assignment(ss, kappa, x)) for fi in ss.f]
        assert values == [0, 0, 0]


def test_sign_profile_of_a_positive_polynomial():
    u = Universe.standard(m=2, s=2)
    assert term_sign_profile(u.monomial({"kappa1": 1, "x1": 1, "x2": 1}) + u.var("kappa2")) == "all-positive"


@given(zero_one_networks(s_max=4, m_max=8))
def test_conservation_laws_annihilate_f(net):
    sd = stoichiometric_data(net)
    ss = build_f(sd)
    u = ss.universe
    for row in sd.W:
        total = u.zero()
        for w, fi in zip(row, ss.f):
            total = total + fi * w
        assert total.is_zero()


def test_f_equals_n_times_monomial_fluxes():
    rng = random.Random(3)
    for _ in range(30):
        sd, ss = _system(random_network(rng, 3, rng.randint(1, 7)))
        for i in range(sd.s):
            total = ss.universe.zero()
            for j in range(sd.m):
                total = total + ss.v[j] * sd.N[i][j]
            assert total == ss.f[i]
        for j, vj in enumerate(ss.v):
            (e, c), = vj.terms.items()
            assert c == 1
            assert e[j] == 1 and sum(e[:sd.m]) == 1
            assert tuple(e[sd.m:sd.m + sd.s]) == tuple(sd.Y[i][j] for i in range(sd.s))


@settings(max_examples=60)
@given(zero_one_networks(s_min=2, s_max=4, m_max=8))
def test_jacobian_matches_central_differences(net):
    sd = stoichiometric_data(net)
    ss = build_f(sd)
    rng = random.Random(net.one_line())
    kappa = [random_rational(rng, 1, 5) for _ in range(sd.m)]
    x = [random_rational(rng, 1, 5) for _ in range(sd.s)]
    J = jacobian(ss.f, ss.x)
    step = 1e-5
    for i in range(sd.s):
        for k in range(sd.s):
            exact = float(evaluate(J[i][k], parameter_assignment(ss, kappa, x)))
            hi = [float(v) for v in x]
            lo = list(hi)
            hi[k] += step
            lo[k] -= step
            fa = ss.f[i].evaluate(parameter_assignment(ss, [float(v) for v in kappa], hi))
            fb = ss.f[i].evaluate(parameter_assignment(ss, [float(v) for v in kappa], lo))
            numeric = (fa - fb) / (2 * step)
            assert abs(exact - numeric) <= 1e-6 * max(1.0, abs(exact))
