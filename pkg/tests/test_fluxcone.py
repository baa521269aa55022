import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from conftest import zero_one_networks
from zonet.fluxcone import decompose_flux, extreme_rays, extreme_rays_of, strictly_positive_flux_exists
from zonet.lowdim import load_catalog, load_example
from zonet.network.core import parse_network
from zonet.network.enumeration import Filters, enumerate_networks
from zonet.network.stoich import stoichiometric_data
from zonet.symbolic.massaction import build_f, parameter_assignment


def _brute_force_rays(N, m):
    """Oracle: minimal supports whose kernel is one-dimensional and positive."""
    A = sympy.Matrix(N) if N else sympy.zeros(0, m)
    rays = set()
    for size in range(1, m + 1):
        for supp in combinations(range(m), size):
            if any(set(r) < set(supp) for r in (tuple(j for j, v in enumerate(ray) if v) for ray in rays)):
                continue
            sub = A[:, list(supp)] if A.rows else sympy.zeros(1, size)
            ker = sub.nullspace()
            if len(ker) != 1:
                continue
            v = ker[0]
            if all(c > 0 for c in v) or all(c < 0 for c in v):
                v = v * (1 if v[0] > 0 else -1)
                g = sympy.ilcm(*[sympy.Rational(c).q for c in v])
                ints = [int(c * g) for c in v]
                d = int(sympy.igcd(*ints))
                full = [0] * m
                for j, c in zip(supp, ints):
                    full[j] = c // d
                rays.add(tuple(full))
    return rays


def _in_cone(gamma, generators) -> bool:
    """LP oracle: gamma = sum of nonnegative multiples of the generators."""
    if not generators:
        return not any(gamma)
    A = np.array(generators, dtype=float).T
    res = linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=np.array(gamma, dtype=float), bounds=[(0, None)] * A.shape[1])
    return res.status == 0


@settings(max_examples=80)
@given(zero_one_networks(s_min=2, s_max=3, m_max=7))
def test_rays_match_minimal_support_oracle(net):
    sd = stoichiometric_data(net)
    rays = extreme_rays(sd)
    assert set(rays.rays) == _brute_force_rays([list(r) for r in sd.N], sd.m)


@settings(max_examples=60)
@given(zero_one_networks(s_min=2, s_max=3, m_max=8))
def test_ray_invariants(net):
    sd = stoichiometric_data(net)
    rays = extreme_rays(sd)
    for ray in rays.rays:
        assert all(v >= 0 for v in ray) and any(ray)
        assert all(sum(sd.N[i][j] * ray[j] for j in range(sd.m)) == 0 for i in range(sd.s))
        assert np.gcd.reduce([v for v in ray if v]) == 1
    supports = [rays.support(k) for k in range(rays.t)]
    assert not any(a < b for a in supports for b in supports)
    if rays.t <= 10:
        for k in range(rays.t):
            others = [r for i, r in enumerate(rays.rays) if i != k]
            assert not _in_cone(rays.rays[k], others)


@settings(max_examples=40)
@given(zero_one_networks(s_min=2, s_max=3, m_max=8), st.integers(0, 10**6))
def test_rays_are_independent_of_row_operations(net, seed):
    rng = random.Random(seed)
    sd = stoichiometric_data(net)
    while True:
        A = [[rng.randint(-2, 2) for _ in range(sd.s)] for _ in range(sd.s)]
        if sympy.Matrix(A).det() != 0:
            break
    AN = [[sum(A[i][k] * sd.N[k][j] for k in range(sd.s)) for j in range(sd.m)] for i in range(sd.s)]
    assert extreme_rays_of(AN, sd.m).rays == extreme_rays(sd).rays


def test_rays_come_in_deterministic_order():
    rays = extreme_rays(stoichiometric_data(load_catalog()["g35"]))
    keys = [(len(rays.support(k)), sorted(rays.support(k)), rays.rays[k]) for k in range(rays.t)]
    assert keys == sorted(keys)


def test_reversible_pair_has_a_single_ray():
    rays = extreme_rays(stoichiometric_data(load_example("example2")))
    assert rays.rays == ((1, 1),)


def test_full_rank_triples_have_trivial_cone():
    net = next(iter(enumerate_networks(3, 3, Filters(rank=3))))
    rays = extreme_rays(stoichiometric_data(net))
    assert rays.t == 0
    assert not strictly_positive_flux_exists(rays)


def test_single_reaction_has_no_positive_flux():
    assert not strictly_positive_flux_exists(extreme_rays(stoichiometric_data(parse_network("X1 -> X2"))))


def test_example5_has_positive_flux_and_the_lp_agrees():
    sd = stoichiometric_data(load_example("example5"))
    assert strictly_positive_flux_exists(extreme_rays(sd))
    # LP oracle: N g = 0 with g >= 1 is feasible.
    N = np.array(sd.N, dtype=float)
    res = linprog(np.zeros(sd.m), A_eq=N, b_eq=np.zeros(sd.s), bounds=[(1, None)] * sd.m)
    assert res.status == 0


@settings(max_examples=60)
@given(zero_one_networks(s_min=2, s_max=3, m_max=8))
def test_positive_flux_matches_lp(net):
    sd = stoichiometric_data(net)
    N = np.array(sd.N, dtype=float)
    res = linprog(np.zeros(sd.m), A_eq=N, b_eq=np.zeros(sd.s), bounds=[(1, None)] * sd.m)
    assert strictly_positive_flux_exists(extreme_rays(sd)) == (res.status == 0)


def test_decompose_a_ray_and_zero():
    rays = extreme_rays(stoichiometric_data(load_catalog()["g35"]))
    lam = decompose_flux(rays.rays[0], rays)
    assert lam is not None
    assert tuple(sum(lam[k] * rays.rays[k][j] for k in range(rays.t)) for j in range(rays.m)) == rays.rays[0]
    assert decompose_flux([0] * rays.m, rays) == (0,) * rays.t


def test_decompose_example5_steady_state_flux():
    sd = stoichiometric_data(load_example("example5"))
    ss = build_f(sd)
    rays = extreme_rays(sd)
    v = [vj.evaluate(parameter_assignment(ss, (1, 3, 2, 1, 1), (1, 1, 1))) for vj in ss.v]
    lam = decompose_flux(v, rays)
    assert lam is not None and all(x >= 0 for x in lam)
    assert [sum(lam[k] * rays.rays[k][j] for k in range(rays.t)) for j in range(sd.m)] == v
    assert _in_cone(v, rays.rays)


def test_decompose_rejects_vectors_outside_the_cone():
    rays = extreme_rays(stoichiometric_data(load_example("example5")))
    assert decompose_flux([1, 0, 0, 0, 0], rays) is None


def test_random_cone_points_decompose_exactly():
    rng = random.Random(5)
    for name, net in load_catalog().items():
        rays = extreme_rays(stoichiometric_data(net))
        for _ in range(5):
            weights = [Fraction(rng.randint(0, 6), rng.randint(1, 4)) for _ in range(rays.t)]
            gamma = [sum(w * r[j] for w, r in zip(weights, rays.rays)) for j in range(rays.m)]
            lam = decompose_flux(gamma, rays)
            assert lam is not None, name
            assert all(x >= 0 for x in lam)
            assert [sum(lam[k] * rays.rays[k][j] for k in range(rays.t)) for j in range(rays.m)] == gamma
