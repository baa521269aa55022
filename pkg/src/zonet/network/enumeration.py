"""The zero-one reaction universe, canonical forms and network enumeration."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb
from typing import Iterable, Iterator, Sequence

from zonet import linalg
from zonet.network.core import Complex, NetworkError, Reaction, ReactionNetwork


@lru_cache(maxsize=None)
def zero_one_complexes(s: int) -> tuple[tuple[int, ...], ...]:
    """All 0/1 complexes on ``s`` species: by size, then X1 before X2 before ..."""
    vecs = list(product((0, 1), repeat=s))
    return tuple(sorted(vecs, key=lambda v: (sum(v), tuple(-c for c in v))))


@lru_cache(maxsize=None)
def reaction_universe(s: int) -> tuple[Reaction, ...]:
    """Every zero-one reaction on ``s`` species, ordered by (reactant, product).

    For two species this is the twelve-reaction template in its usual order.
    """
    cx = zero_one_complexes(s)
    return tuple(
        Reaction(Complex(a), Complex(b)) for a in cx for b in cx if a != b
    )


@lru_cache(maxsize=None)
def _universe_index(s: int) -> dict:
    return {r.key: j for j, r in enumerate(reaction_universe(s))}


def universe_indices(net: ReactionNetwork) -> tuple[int, ...]:
    idx = _universe_index(net.s)
    try:
        return tuple(idx[r.key] for r in net.reactions)
    except KeyError:
        raise NetworkError("network is not zero-one") from None


def _permute_key(key, perm):
    a, b = key
    return tuple(a[p] for p in perm), tuple(b[p] for p in perm)


@lru_cache(maxsize=None)
def _permutation_tables(s: int) -> tuple[tuple[int, ...], ...]:
    """For each species permutation, the induced map on universe indices.

    The universe is sorted by reaction key, so comparing sorted index
    tuples is the same as comparing sorted key tuples.
    """
    uni = reaction_universe(s)
    idx = _universe_index(s)
    keys_sorted = sorted(range(len(uni)), key=lambda j: uni[j].key)
    rank_of = {j: k for k, j in enumerate(keys_sorted)}
    tables = []
    for perm in permutations(range(s)):
        tables.append(tuple(rank_of[idx[_permute_key(uni[j].key, perm)]] for j in range(len(uni))))
    return tuple(tables)


@lru_cache(maxsize=None)
def _key_rank(s: int) -> tuple[int, ...]:
    uni = reaction_universe(s)
    order = sorted(range(len(uni)), key=lambda j: uni[j].key)
    rank = [0] * len(uni)
    for k, j in enumerate(order):
        rank[j] = k
    return tuple(rank)


def _canonical_ranks(indices: Sequence[int], s: int) -> tuple[int, ...]:
    return min(tuple(sorted(t[j] for j in indices)) for t in _permutation_tables(s))


def canonical_form(net: ReactionNetwork) -> ReactionNetwork:
    """Lexicographically smallest relabeling, reactions sorted by (reactant, product).

    Species keep their positional names; two networks have equal canonical
    forms iff a species permutation maps one onto the other.
    """
    if not net.zero_one:
        return _canonical_general(net)
    s = net.s
    uni = reaction_universe(s)
    order = sorted(range(len(uni)), key=lambda j: uni[j].key)
    ranks = _canonical_ranks(universe_indices(net), s)
    return ReactionNetwork(net.species, tuple(uni[order[k]] for k in ranks), True)


def _canonical_general(net: ReactionNetwork) -> ReactionNetwork:
    best = None
    for perm in permutations(range(net.s)):
        keys = tuple(sorted(_permute_key(r.key, perm) for r in net.reactions))
        if best is None or keys < best:
            best = keys
    return ReactionNetwork.from_pairs(best, net.species, zero_one=False)


def reaction_alignment(src: ReactionNetwork, dst: ReactionNetwork) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """A species permutation mapping ``src`` onto ``dst`` and the induced reaction map.

    Returns ``(perm, position)`` where species ``perm[i]`` of ``src`` plays
    the role of species ``i`` of ``dst`` and reaction ``j`` of ``src`` is
    reaction ``position[j]`` of ``dst``; None if the networks are not
    isomorphic.
    """
    if src.s != dst.s or src.m != dst.m:
        return None
    where = {r.key: k for k, r in enumerate(dst.reactions)}
    for perm in permutations(range(src.s)):
        pos = [where.get(_permute_key(r.key, perm)) for r in src.reactions]
        if None not in pos:
            return perm, tuple(pos)
    return None


def is_canonical_indices(indices: Sequence[int], s: int) -> bool:
    """True iff the universe-index subset is the representative of its orbit."""
    rank = _key_rank(s)
    mine = tuple(sorted(rank[j] for j in indices))
    return all(tuple(sorted(t[j] for j in indices)) >= mine for t in _permutation_tables(s))


def network_from_indices(indices: Iterable[int], s: int) -> ReactionNetwork:
    uni = reaction_universe(s)
    return ReactionNetwork(tuple(f"X{i + 1}" for i in range(s)), tuple(uni[j] for j in indices), True)


# ---------------------------------------------------------------------------
# Filters


@dataclass(frozen=True)
class Filters:
    """Enumeration filters; ``None`` disables a filter.

    ``nontrivial`` means a strictly positive flux exists and the sum of the
    r x r principal minors of J(p, lambda) is not the zero polynomial.
    """

    rank: int | None = None
    positive_flux: bool = False
    nontrivial: bool = False
    canonical: bool = False

    @classmethod
    def parse(cls, items: Iterable[str], canonical: bool = False) -> "Filters":
        rank = None
        positive = nontrivial = False
        for item in items:
            item = item.strip()
            if not item:
                continue
            if item.startswith("rank="):
                rank = int(item.split("=", 1)[1])
            elif item in ("positive-flux", "positive_flux"):
                positive = True
            elif item in ("nontrivial", "non-trivial"):
                nontrivial = True
            elif item == "canonical":
                canonical = True
            else:
                raise ValueError(f"unknown filter {item!r}")
        return cls(rank, positive, nontrivial, canonical)

    def describe(self) -> str:
        parts = []
        if self.rank is not None:
            parts.append(f"rank={self.rank}")
        if self.positive_flux:
            parts.append("positive-flux")
        if self.nontrivial:
            parts.append("nontrivial")
        if self.canonical:
            parts.append("canonical")
        return ",".join(parts) or "none"


@lru_cache(maxsize=None)
def _columns(s: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(b - a for a, b in zip(r.reactant.coefficients, r.product.coefficients))
        for r in reaction_universe(s)
    )


def _int_rank(cols: Sequence[Sequence[int]], s: int) -> int:
    """Rank of a small integer matrix given by columns, fraction-free."""
    rows = [list(c) for c in cols]
    r = 0
    for i in range(s):
        piv = next((k for k in range(r, len(rows)) if rows[k][i]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for k in range(r + 1, len(rows)):
            if rows[k][i]:
                f, g = rows[k][i], pr[i]
                rows[k] = [g * x - f * y for x, y in zip(rows[k], pr)]
        r += 1
    return r


def subset_rank(indices: Sequence[int], s: int) -> int:
    cols = _columns(s)
    return _int_rank([cols[j] for j in indices], s)


@lru_cache(maxsize=None)
def _sign_certificates(s: int) -> tuple[tuple[int, int], ...]:
    """Bit masks (negative, positive) of universe columns for each y in {-1,0,1}^s.

    If y^T N >= 0 with some entry positive, no positive flux exists.
    """
    cols = _columns(s)
    out = []
    for y in product((-1, 0, 1), repeat=s):
        if not any(y):
            continue
        neg = pos = 0
        for j, c in enumerate(cols):
            v = sum(a * b for a, b in zip(y, c))
            if v < 0:
                neg |= 1 << j
            elif v > 0:
                pos |= 1 << j
        out.append((neg, pos))
    return tuple(out)


def no_flux_certificate(indices: Sequence[int], s: int) -> bool:
    """A quick sufficient test that the flux cone misses the open orthant."""
    mask = 0
    for j in indices:
        mask |= 1 << j
    return any(not (mask & neg) and (mask & pos) for neg, pos in _sign_certificates(s))


def orbit_size(indices: Sequence[int], s: int) -> int:
    return len({tuple(sorted(t[j] for j in indices)) for t in _permutation_tables(s)})


def flux_class(net: ReactionNetwork) -> str:
    """``no-positive-flux``, ``trivial`` (minor sum vanishes) or ``nontrivial``."""
    from zonet.fluxcone import extreme_rays_of, strictly_positive_flux_exists
    from zonet.network.stoich import stoichiometric_data
    from zonet.sign import minor_sum_is_zero

    if net.zero_one and no_flux_certificate(universe_indices(net), net.s):
        return "no-positive-flux"
    N = [
        [r.product.coefficients[i] - r.reactant.coefficients[i] for r in net.reactions]
        for i in range(net.s)
    ]
    rays = extreme_rays_of(N, net.m)
    if not strictly_positive_flux_exists(rays):
        return "no-positive-flux"
    return "trivial" if minor_sum_is_zero(stoichiometric_data(net), rays) else "nontrivial"


def passes(net: ReactionNetwork, filters: Filters) -> bool:
    """Apply the non-canonical filters to one network."""
    if filters.rank is not None:
        from zonet.network.stoich import stoichiometric_data

        if stoichiometric_data(net).rank != filters.rank:
            return False
    if not (filters.positive_flux or filters.nontrivial):
        return True
    cls = flux_class(net)
    if cls == "no-positive-flux":
        return False
    return cls == "nontrivial" or not filters.nontrivial


def enumerate_indices(s: int, m: int, filters: Filters = Filters()) -> Iterator[tuple[int, ...]]:
    """Universe-index subsets passing ``filters``, in lexicographic order."""
    if s < 1 or s > 4:
        raise ValueError("species count must be between 1 and 4")
    size = len(reaction_universe(s))
    if m < 1 or m > size:
        raise ValueError(f"reaction count must be between 1 and {size} for {s} species")
    if m > 8:
        raise ValueError("reaction count above 8 is outside the supported range")
    for idx in combinations(range(size), m):
        if filters.canonical and not is_canonical_indices(idx, s):
            continue
        if filters.rank is not None and subset_rank(idx, s) != filters.rank:
            continue
        if (filters.positive_flux or filters.nontrivial) and not passes(network_from_indices(idx, s), filters):
            continue
        yield idx


def enumerate_networks(s: int, m: int, filters: Filters = Filters()) -> Iterator[ReactionNetwork]:
    """Each m-subset of the zero-one universe on ``s`` species that passes ``filters``.

    With ``filters.canonical`` one representative per species-permutation
    orbit is produced (the orbit member that is its own canonical form).
    """
    for idx in enumerate_indices(s, m, filters):
        net = network_from_indices(idx, s)
        yield canonical_form(net) if filters.canonical else net


def universe_size(s: int) -> int:
    return len(reaction_universe(s))


def subset_count(s: int, m: int) -> int:
    return comb(universe_size(s), m)


def sample_networks(
    s: int,
    m: int,
    count: int,
    filters: Filters = Filters(),
    seed: int = 0,
    max_draws: int = 10_000_000,
) -> list[ReactionNetwork]:
    """Distinct random networks passing ``filters``, drawn uniformly from m-subsets.

    With ``filters.canonical`` duplicates up to species permutation are
    rejected and the canonical representative is returned.
    """
    rng = random.Random(seed)
    size = universe_size(s)
    seen: set[tuple[int, ...]] = set()
    out = []
    draws = 0
    while len(out) < count:
        draws += 1
        if draws > max_draws:
            raise RuntimeError(f"only {len(out)} of {count} networks found after {max_draws} draws")
        idx = tuple(sorted(rng.sample(range(size), m)))
        net = network_from_indices(idx, s)
        if filters.canonical:
            net = canonical_form(net)
            idx = tuple(sorted(universe_indices(net)))
        if idx in seen:
            continue
        seen.add(idx)
        if filters.rank is not None and subset_rank(idx, s) != filters.rank:
            continue
        if (filters.positive_flux or filters.nontrivial) and not passes(net, filters):
            continue
        out.append(net)
    return out


def count_by_convention(s: int, m: int, rank: int | None = None) -> dict[str, int]:
    """Network counts for the filter combinations the pipeline documents.

    Keys are ``<filters>/<labeled|canonical>``. Only orbit representatives
    are analysed; every filter is invariant under species relabeling, so the
    labeled count adds up orbit sizes.
    """
    r = rank if rank is not None else s
    stages = ("all", "rank", "positive-flux", "nontrivial")
    labeled = dict.fromkeys(stages, 0)
    canon = dict.fromkeys(stages, 0)

    def bump(stage, size):
        labeled[stage] += size
        canon[stage] += 1

    for idx in combinations(range(universe_size(s)), m):
        if not is_canonical_indices(idx, s):
            continue
        size = orbit_size(idx, s)
        bump("all", size)
        if subset_rank(idx, s) != r:
            continue
        bump("rank", size)
        cls = flux_class(network_from_indices(idx, s))
        if cls == "no-positive-flux":
            continue
        bump("positive-flux", size)
        if cls == "nontrivial":
            bump("nontrivial", size)
    names = {"all": "none", "rank": f"rank={r}", "positive-flux": f"rank={r},positive-flux",
             "nontrivial": f"rank={r},positive-flux,nontrivial"}
    out = {}
    for k in stages:
        out[f"{names[k]}/labeled"] = labeled[k]
        out[f"{names[k]}/canonical"] = canon[k]
    return out
