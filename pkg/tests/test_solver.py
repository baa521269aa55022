import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_network, random_rank_one_network
from zonet.fluxcone import extreme_rays, strictly_positive_flux_exists
from zonet.lowdim import load_example
from zonet.network.core import parse_network
from zonet.network.stoich import stoichiometric_data
from zonet.solver.interval import Interval, interval_det, round_dyadic
from zonet.solver.steady import (
    SteadyStateProblem,
    classify_stability,
    hurwitz_data,
    hurwitz_determinants,
    nondegeneracy,
    principal_minor_sums,
    solve_positive_steady_states,
)
from zonet.solver.univariate import isolate_positive_roots

EXAMPLE6_KAPPA = [Fraction(5765, 16), Fraction(1655, 65536)] + [Fraction(1, 2)] * 4
EXAMPLE6_POINTS = [
    (0.05546474050, 0.02698403889, 0.02501921562),
    (0.05999575106, 0.02912421107, 0.02312970964),
    (0.8340329166, 0.2942918947, 0.001663824382),
]


def test_example5_has_one_stable_and_one_unstable_state():
    res = solve_positive_steady_states(load_example("example5"), [1, 3, 2, 1, 1])
    assert res.status == "finite"
    assert [s.midpoint for s in res] == [(1.0, 1.0, 1.0), (2.0, 2.0, 2.0)]
    assert [s.stability for s in res] == ["stable", "unstable"]
    assert all(s.nondegenerate and s.certified for s in res)
    assert [s.det_jac_f_sign for s in res] == [-1, 1]
    for sol, point in zip(res, ((1, 1, 1), (2, 2, 2))):
        assert all(iv.contains(v) for iv, v in zip(sol.x, point))
        assert all(iv.width <= Fraction(1, 10**9) for iv in sol.x)


def test_example5_hurwitz_values():
    net = load_example("example5")
    low = hurwitz_data(net, [1, 3, 2, 1, 1], (1, 1, 1))
    high = hurwitz_data(net, [1, 3, 2, 1, 1], (2, 2, 2))
    # lambda^3 + 5 lambda^2 + 5 lambda + 1 and lambda^3 + 7 lambda^2 + 8 lambda - 4
    assert list(low.char_poly) == [1, 5, 5, 1]
    assert list(low.hurwitz_determinants) == [5, 24, 24]
    assert list(high.char_poly) == [-4, 8, 7, 1]
    assert list(high.hurwitz_determinants) == [7, 60, -240]
    assert classify_stability(net, [1, 3, 2, 1, 1], (2, 2, 2)) == "unstable"
    assert nondegeneracy(net, [1, 3, 2, 1, 1], (1, 1, 1)) == (True, -1, -1)


def test_example6_is_bistable():
    res = solve_positive_steady_states(load_example("example6"), EXAMPLE6_KAPPA)
    assert len(res) == 3
    for sol, expected in zip(res, EXAMPLE6_POINTS):
        assert np.allclose(sol.midpoint, expected, rtol=0, atol=1e-6)
    assert [s.stability for s in res] == ["stable", "unstable", "stable"]


def test_example2_unique_state_in_its_class():
    res = solve_positive_steady_states(load_example("example2"), [1, 1], [2, 0])
    assert [s.midpoint for s in res] == [(1.0, 1.0, 1.0)]
    assert res[0].stability == "stable" and res[0].det_jac_h_sign == -1


def test_example3_continuum_is_reported():
    assert solve_positive_steady_states(load_example("example3"), [1, 1, 1, 1, 2, 2]).status == "degenerate-continuum"
    res = solve_positive_steady_states(load_example("example3"), [1, 2, 1, 1, 2, 2])
    assert res.status == "finite" and len(res) == 0


def test_input_validation():
    net = load_example("example5")
    with pytest.raises(ValueError):
        solve_positive_steady_states(net, [1, 1, 1])
    with pytest.raises(ValueError):
        solve_positive_steady_states(net, [1, 0, 1, 1, 1])
    with pytest.raises(ValueError):
        solve_positive_steady_states(load_example("example2"), [1, 1])
    with pytest.raises(ValueError):
        SteadyStateProblem(parse_network("X1 + X2 -> X3; X3 -> X4 + X5; X5 -> X1; X4 -> 0"))


def test_hurwitz_determinants_of_a_known_cubic():
    # lambda^3 + 2 lambda^2 + 3 lambda + 4, constant term first
    assert hurwitz_determinants([4, 3, 2, 1]) == [2, 2, 8]
    assert hurwitz_determinants([2, 3, 1]) == [3, 6]


@settings(max_examples=200)
@given(st.lists(st.integers(-6, 6), min_size=3, max_size=4))
def test_hurwitz_positivity_matches_root_locations(low):
    coeffs = [Fraction(c) for c in low] + [Fraction(1)]
    roots = np.roots([float(c) for c in reversed(coeffs)])
    if np.any(np.abs(roots.real) < 1e-9):
        return
    assert all(h > 0 for h in hurwitz_determinants(coeffs)) == bool(np.all(roots.real < 0))


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_principal_minor_sums_give_the_characteristic_polynomial(rows):
    A = [[Fraction(v) for v in row] for row in rows]
    E = principal_minor_sums(A)
    lam = sympy.Symbol("lam")
    char = sympy.Poly((lam * sympy.eye(3) - sympy.Matrix(rows)).det(), lam).all_coeffs()
    assert [int(c) for c in char] == [E[0], -E[1], E[2], -E[3]]


@given(st.fractions(min_value=-10**6, max_value=10**6), st.integers(8, 120))
def test_dyadic_rounding_brackets_the_value(v, bits):
    lo, hi = round_dyadic(v, bits), round_dyadic(v, bits, up=True)
    assert lo <= v <= hi
    assert lo.denominator & (lo.denominator - 1) == 0
    assert hi.denominator & (hi.denominator - 1) == 0


interval_pairs = st.tuples(st.fractions(-20, 20), st.fractions(0, 5)).map(lambda t: Interval(t[0], t[0] + t[1]))


@given(interval_pairs, interval_pairs, st.floats(0, 1), st.floats(0, 1), st.integers(0, 4))
def test_interval_arithmetic_encloses_point_results(a, b, ta, tb, k):
    x = a.lo + Fraction(ta) * a.width
    y = b.lo + Fraction(tb) * b.width
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert (a ** k).contains(x ** k)
    assert a.outward().contains_interval(a, strict=False)


def test_interval_determinant_encloses_point_determinant():
    rng = random.Random(2)
    for _ in range(50):
        mids = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3)] for _ in range(3)]
        box = [[Interval.around(v, Fraction(1, 100)) for v in row] for row in mids]
        assert interval_det(box).contains(sympy.Matrix(mids).det())


def test_positive_root_isolation_matches_sympy():
    rng = random.Random(4)
    x = sympy.Symbol("x")
    for _ in range(60):
        coeffs = [rng.randint(-8, 8) for _ in range(rng.randint(2, 7))]
        if not any(coeffs[1:]):
            continue
        boxes = isolate_positive_roots(coeffs)
        roots = [r for r in sympy.Poly(list(reversed(coeffs)), x).real_roots() if r > 0]
        distinct = sorted(set(roots))
        assert len(boxes) == len(distinct)
        for (a, b), r in zip(boxes, distinct):
            assert a <= r <= b
            assert b - a <= Fraction(1, 10**12)


def _numeric_system(sd, kappa, c):
    """Float h and its Jacobian with conservation rows replacing pivot rows."""
    N = np.array(sd.N, dtype=float)
    Y = np.array(sd.Y, dtype=float)
    W = np.array(sd.W, dtype=float).reshape(sd.d, sd.s)
    k = np.array([float(v) for v in kappa])
    cv = np.array([float(v) for v in c])
    lead = list(sd.leading)

    def h(x):
        v = k * np.prod(x[:, None] ** Y, axis=0)
        out = N @ v
        if lead:
            out[lead] = W @ x - cv
        return out

    def jac(x):
        v = k * np.prod(x[:, None] ** Y, axis=0)
        J = (N * v) @ Y.T / x
        if lead:
            J[lead] = W
        return J

    return h, jac


def _newton_oracle(sd, kappa, c, per_axis=7):
    """Positive roots found by damped Newton in log coordinates from a grid."""
    h, jac = _numeric_system(sd, kappa, c)
    found = []
    for start in product(np.linspace(-4, 4, per_axis), repeat=sd.s):
        u = np.array(start)
        for _ in range(60):
            x = np.exp(u)
            try:
                step = np.linalg.solve(jac(x) * x, -h(x))
            except np.linalg.LinAlgError:
                break
            u = u + np.clip(step, -1.0, 1.0)
            if np.max(np.abs(step)) < 1e-13:
                break
        if not np.all(np.abs(u) < 12):
            continue
        x = np.exp(u)
        if np.max(np.abs(h(x))) > 1e-9 * max(1.0, np.max(x)) or abs(np.linalg.det(jac(x))) < 1e-8:
            continue
        if not any(np.allclose(x, y, rtol=1e-6, atol=1e-9) for y in found):
            found.append(x)
    return found


def _draw_class(rng, sd):
    x0 = [Fraction(rng.randint(1, 12), rng.randint(1, 4)) for _ in range(sd.s)]
    return [sum(w * v for w, v in zip(row, x0)) for row in sd.W]


def _low_rank_samples(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        net = random_network(rng, rng.randint(2, 3), rng.randint(2, 6))
        sd = stoichiometric_data(net)
        if sd.rank == 0 or sd.rank > 2 or not strictly_positive_flux_exists(extreme_rays(sd)):
            continue
        kappa = [Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(sd.m)]
        out.append((net, sd, kappa, _draw_class(rng, sd)))
    return out


def test_no_positive_root_is_missed():
    checked = 0
    for net, sd, kappa, c in _low_rank_samples(60, seed=21):
        res = solve_positive_steady_states(net, kappa, c)
        if res.status != "finite":
            continue
        mids = [np.array(s.midpoint) for s in res]
        for x in _newton_oracle(sd, kappa, c):
            assert any(np.allclose(x, m, rtol=1e-6, atol=1e-9) for m in mids), (net.one_line(), kappa, c, x)
            checked += 1
        h, _ = _numeric_system(sd, kappa, c)
        for m in mids:
            assert np.max(np.abs(h(m))) <= 1e-8 * max(1.0, np.max(m))
    assert checked > 20


def test_rank_two_nondegenerate_states_are_stable():
    seen = 0
    for net, sd, kappa, c in _low_rank_samples(150, seed=22):
        if sd.rank != 2:
            continue
        for sol in solve_positive_steady_states(net, kappa, c):
            if sol.nondegenerate:
                assert sol.det_jac_h_sign == 1
                assert sol.stability == "stable"
                seen += 1
    assert seen > 10


def test_rank_one_states_are_stable_with_negative_determinant():
    rng = random.Random(23)
    seen = 0
    for _ in range(80):
        net = random_rank_one_network(rng, rng.randint(1, 5))
        sd = stoichiometric_data(net)
        kappa = [Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(sd.m)]
        for sol in solve_positive_steady_states(net, kappa, _draw_class(rng, sd)):
            assert sol.det_jac_h_sign == -1 and sol.stability == "stable"
            seen += 1
    assert seen > 10


def test_full_rank_stable_states_have_negative_jacobian_determinant():
    rng = random.Random(24)
    seen = 0
    while seen < 15:
        net = random_network(rng, 3, rng.randint(4, 7))
        sd = stoichiometric_data(net)
        if sd.rank != 3:
            continue
        kappa = [Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(sd.m)]
        for sol in solve_positive_steady_states(net, kappa):
            if sol.stability == "stable":
                assert sol.det_jac_f_sign == -1
                seen += 1
            if sol.det_jac_f_sign == 1:
                assert sol.stability == "unstable"


def test_double_root_on_the_boundary_is_not_a_steady_state():
    # x1 = x2 = 57/5 - x3 vanish together at the only root of the class.
    net = parse_network("X1 + X2 + X4 + X5 -> X3 + X4 + X5")
    res = solve_positive_steady_states(net, [Fraction(41, 10)], [Fraction(57, 5), Fraction(57, 5), Fraction(12, 5), Fraction(2, 9)])
    assert res.status == "finite" and len(res) == 0


def test_vanishing_system_on_an_empty_positive_class_has_no_steady_states():
    # With x1 = 0 forced by the class, f = -kappa x1 x3 vanishes identically.
    net = parse_network("X1 + X3 -> X1")
    assert solve_positive_steady_states(net, [5], [0]).status == "finite"
    assert len(solve_positive_steady_states(net, [5], [0])) == 0
    assert solve_positive_steady_states(net, [5], [1]).status == "finite"


def test_exact_rational_roots_get_exact_enclosures():
    res = solve_positive_steady_states(load_example("example2"), [1, 1], [2, 0])
    assert all(iv.lo == iv.hi == 1 for iv in res[0].x)
    assert res[0].certified and res[0].nondegenerate


@settings(max_examples=150)
@given(
    st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=1, max_size=3),
    st.lists(st.integers(-4, 4), min_size=3, max_size=3),
)
def test_positive_solution_test_matches_lp(rows, rhs):
    from scipy.optimize import linprog

    from zonet.linalg import positive_solution_exists

    b = rhs[: len(rows)]
    # maximize t subject to A x = b, x >= t, t <= 1
    A_eq = np.hstack([np.array(rows, dtype=float), np.zeros((len(rows), 1))])
    A_ub = np.hstack([-np.eye(4), np.ones((4, 1))])
    lp = linprog([0, 0, 0, 0, -1], A_ub=A_ub, b_ub=np.zeros(4), A_eq=A_eq, b_eq=np.array(b, dtype=float), bounds=[(None, None)] * 4 + [(None, 1)])
    expected = lp.status == 0 and -lp.fun > 1e-9
    assert positive_solution_exists(rows, b, 4) == expected
