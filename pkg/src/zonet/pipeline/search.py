"""Per-network screening and randomized multistationarity search."""
from __future__ import annotations

import json
import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from zonet.fluxcone import extreme_rays, strictly_positive_flux_exists
from zonet.lowdim import load_example
from zonet.network.core import ReactionNetwork
from zonet.network.enumeration import canonical_form, reaction_alignment
from zonet.network.stoich import StoichiometricData, stoichiometric_data
from zonet.pipeline.config import PipelineConfig
from zonet.sign import b_structure, fast_sign_report, injectivity_screen
from zonet.solver.steady import SolveResult, SteadyStateProblem

STAGES = (
    "no-positive-flux",
    "screened-injective",
    "no-multistationarity-found",
    "multistationary",
    "multistable",
    "timed-out",
    "error",
)


class _Timeout(Exception):
    pass


@dataclass
class Probe:
    """One solve at fixed (kappa, c)."""

    kappa: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    result: SolveResult
    origin: str

    @property
    def total(self) -> int:
        return len(self.result.solutions)

    @property
    def nondegenerate(self) -> int:
        return len(self.result.nondegenerate)

    @property
    def stable(self) -> int:
        return sum(1 for s in self.result.nondegenerate if s.stability == "stable")

    def score(self) -> tuple:
        return (self.nondegenerate >= 2 and self.stable >= 2, self.nondegenerate, self.stable)

    def to_json(self) -> dict:
        return {
            "kappa": [str(k) for k in self.kappa],
            "c": [str(v) for v in self.c],
            "origin": self.origin,
            "status": self.result.status,
            "nondegenerate": self.nondegenerate,
            "stable": self.stable,
            "steady_states": [s.to_json() for s in self.result.solutions],
        }


@dataclass
class NetworkVerdictRecord:
    index: int
    network: str
    canonical: str
    stage: str
    species: int
    reactions: int
    rank: int
    witness: dict | None
    diagnostics: dict
    violations: list[str] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "network": self.network,
            "canonical": self.canonical,
            "stage": self.stage,
            "species": self.species,
            "reactions": self.reactions,
            "rank": self.rank,
            "witness": self.witness,
            "diagnostics": self.diagnostics,
            "violations": self.violations,
            "elapsed_seconds": self.elapsed_seconds,
        }


# ---------------------------------------------------------------------------
# Fixture witnesses


@lru_cache(maxsize=1)
def _bundled_witnesses() -> tuple[tuple[ReactionNetwork, tuple[Fraction, ...], tuple[Fraction, ...]], ...]:
    raw = json.loads(resources.files("zonet").joinpath("data", "witnesses.json").read_text())
    out = []
    for item in raw["witnesses"]:
        net = load_example(item["example"])
        out.append((net, tuple(Fraction(k) for k in item["kappa"]), tuple(Fraction(v) for v in item["c"])))
    return tuple(out)


def _config_witnesses(cfg: PipelineConfig):
    from zonet.pipeline.inputs import load_network_source

    out = []
    for item in cfg.witnesses:
        net = load_network_source(item["network"], cfg.base_dir)
        out.append((net, tuple(Fraction(str(k)) for k in item["kappa"]), tuple(Fraction(str(v)) for v in item.get("c", []))))
    return out


def witness_seeds(net: ReactionNetwork, cfg: PipelineConfig) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """Known witness parameters carried over to ``net`` through an isomorphism.

    Rate constants follow the reaction map. Total constants are carried over
    only when the isomorphism keeps every species in place, since W depends
    on the species order.
    """
    sources = list(_bundled_witnesses()) if cfg.use_fixture_witnesses else []
    sources += _config_witnesses(cfg)
    seeds = []
    for src, kappa, c in sources:
        if src.m != net.m or src.s != net.s:
            continue
        align = reaction_alignment(src, net)
        if align is None:
            continue
        perm, pos = align
        if c and perm != tuple(range(net.s)):
            continue
        mapped = [Fraction(0)] * net.m
        for j, k in enumerate(pos):
            mapped[k] = kappa[j]
        seeds.append((tuple(mapped), c))
    return seeds


# ---------------------------------------------------------------------------
# Sampling


def _rational(value: float, denominator: int) -> Fraction:
    return Fraction(value).limit_denominator(denominator)


class NetworkSearch:
    def __init__(self, sd: StoichiometricData, cfg: PipelineConfig, rng: random.Random, deadline: float):
        self.sd = sd
        self.cfg = cfg
        self.rng = rng
        self.deadline = deadline
        self.problem = SteadyStateProblem(sd)
        self.probes: list[Probe] = []
        self.failures = 0
        lo, hi = cfg.kappa_bounds
        self.log_lo, self.log_hi = math.log(lo), math.log(hi)

    def _clamp(self, v: Fraction) -> Fraction:
        lo, hi = self.cfg.kappa_bounds
        return min(max(v, lo), hi)

    def draw_kappa(self) -> tuple[Fraction, ...]:
        return tuple(
            self._clamp(_rational(math.exp(self.rng.uniform(self.log_lo, self.log_hi)), self.cfg.kappa_denominator))
            for _ in range(self.sd.m)
        )

    def draw_c(self) -> tuple[Fraction, ...]:
        """Total constants of a random positive point, so the class is nonempty."""
        if self.sd.d == 0:
            return ()
        x = [_rational(math.exp(self.rng.uniform(self.log_lo, self.log_hi)), self.cfg.kappa_denominator) for _ in range(self.sd.s)]
        x = [v if v > 0 else self.cfg.kappa_bounds[0] for v in x]
        return tuple(sum((w * v for w, v in zip(row, x)), Fraction(0)) for row in self.sd.W)

    def probe(self, kappa: Sequence[Fraction], c: Sequence[Fraction], origin: str) -> Probe | None:
        if time.monotonic() > self.deadline:
            raise _Timeout
        try:
            result = self.problem.solve(kappa, c)
        except (ArithmeticError, ValueError):
            self.failures += 1
            return None
        p = Probe(tuple(kappa), tuple(c), result, origin)
        self.probes.append(p)
        return p

    def best(self) -> Probe | None:
        best = None
        for p in self.probes:
            if best is None or p.score() > best.score():
                best = p
        return best

    def multistable_found(self) -> bool:
        b = self.best()
        return b is not None and b.score()[0]

    def _midpoint(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
        fine = self.cfg.kappa_denominator * 1000
        return tuple(_rational(math.sqrt(float(x) * float(y)), fine) for x, y in zip(a, b))

    def bisect(self, a: Probe, b: Probe) -> None:
        """Narrow in on the boundary where the positive-root count changes."""
        for _ in range(self.cfg.bisection_steps):
            mid_k = self._midpoint(a.kappa, b.kappa)
            if mid_k == a.kappa or mid_k == b.kappa:
                return
            mid = self.probe(mid_k, a.c, "bisection")
            if mid is None or self.multistable_found():
                return
            if mid.total != a.total:
                b = mid
            else:
                a = mid

    def line_probe(self) -> None:
        """Walk a random line in log-kappa space and bisect the first count change."""
        base = self.rng.choice(self.probes) if self.probes else None
        if base is None:
            return
        half = (self.log_hi - self.log_lo) / 4
        direction = [self.rng.uniform(-half, half) for _ in range(self.sd.m)]
        n = max(self.cfg.line_points, 2)
        prev = None
        for k in range(n):
            t = -1 + 2 * k / (n - 1)
            kap = tuple(
                self._clamp(_rational(float(v) * math.exp(t * d), self.cfg.kappa_denominator))
                for v, d in zip(base.kappa, direction)
            )
            cur = self.probe(kap, base.c, "line")
            if cur is None:
                continue
            if self.multistable_found():
                return
            if prev is not None and cur.total != prev.total:
                self.bisect(prev, cur)
                return
            prev = cur

    def run(self, seeds: Sequence[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]) -> None:
        for kappa, c in seeds:
            if len(c) != self.sd.d:
                c = self.draw_c()
            self.probe(kappa, c, "fixture-witness")
        for _ in range(self.cfg.sample_count):
            if self.multistable_found():
                return
            self.probe(self.draw_kappa(), self.draw_c(), "random")
        random_probes = [p for p in self.probes if p.origin == "random"]
        pairs = [
            (a, b)
            for i, a in enumerate(random_probes)
            for b in random_probes[i + 1:]
            if a.total != b.total and a.c == b.c
        ]
        for a, b in pairs[: self.cfg.line_searches]:
            if self.multistable_found():
                return
            self.bisect(a, b)
        for _ in range(self.cfg.line_searches):
            if self.multistable_found():
                return
            self.line_probe()


# ---------------------------------------------------------------------------
# One network


def _diagnostics(sd: StoichiometricData, rays) -> dict:
    out = {"t": rays.t, "positive_flux": strictly_positive_flux_exists(rays)}
    if rays.t:
        st = b_structure(sd.N, sd.Y, rays)
        theta = st.theta()
        out.update(theta=len(theta), b_terms=st.term_count(), b_tilde_terms=st.term_count(theta))
    else:
        out.update(theta=0, b_terms=0, b_tilde_terms=0)
    if sd.rank == 2:
        out["sign_verdict"] = fast_sign_report(sd, rays).verdict
    else:
        out["sign_verdict"] = "not-applicable"
    return out


def _violations(sd: StoichiometricData, stage_hint: str, diag: dict, probes: Sequence[Probe]) -> list[str]:
    out = []
    most = max((p.nondegenerate for p in probes), default=0)
    found = max((p.total for p in probes), default=0)
    if stage_hint == "screened-injective" and most >= 2:
        out.append("injective-but-multistationary")
    if stage_hint == "no-positive-flux" and found >= 1:
        out.append("no-flux-but-positive-steady-state")
    if diag.get("sign_verdict") == "positive-certified" and most >= 2:
        out.append("certified-but-multistationary")
    if sd.rank == 2 and any(s.nondegenerate and s.stability == "unstable" for p in probes for s in p.result.solutions):
        out.append("rank-two-nondegenerate-not-stable")
    if sd.d == 0 and sd.s == 3:
        if any(s.stability == "stable" and s.det_jac_f_sign != -1 for p in probes for s in p.result.solutions):
            out.append("stable-without-negative-det-jac-f")
    return out


def _revalidate(sd: StoichiometricData, probe: Probe) -> tuple[Probe, bool]:
    """Re-solve at the witness with a fresh problem; keep the smaller claim."""
    again = SteadyStateProblem(sd).solve(probe.kappa, probe.c)
    fresh = Probe(probe.kappa, probe.c, again, probe.origin)
    same = (fresh.nondegenerate, fresh.stable) == (probe.nondegenerate, probe.stable)
    if same:
        return probe, True
    return (fresh if fresh.score() < probe.score() else probe), False


def analyze_for_pipeline(index: int, net: ReactionNetwork, cfg: PipelineConfig) -> NetworkVerdictRecord:
    start = time.monotonic()
    deadline = start + cfg.timeout
    canonical = canonical_form(net).one_line() if net.zero_one else net.one_line()
    rng = random.Random(f"{cfg.seed}:{canonical}")
    try:
        sd = stoichiometric_data(net)
        rays = extreme_rays(sd)
        diag = _diagnostics(sd, rays)
        problem_ok = sd.s <= 4
    except (ArithmeticError, ValueError) as exc:
        return NetworkVerdictRecord(
            index, net.one_line(), canonical, "error", net.s, net.m, -1, None,
            {"error": str(exc)}, [], round(time.monotonic() - start, 3),
        )
    if not problem_ok:
        diag["error"] = "the solver handles at most four species"
        return NetworkVerdictRecord(index, net.one_line(), canonical, "error", sd.s, sd.m, sd.rank, None, diag)

    search = NetworkSearch(sd, cfg, rng, deadline)
    if not diag["positive_flux"]:
        screened = "no-positive-flux"
    else:
        inj = injectivity_screen(search.problem.ss, sd)
        diag["injectivity"] = inj.verdict
        diag["injectivity_screen"] = inj.screen
        screened = "screened-injective" if inj.verdict == "injective" else None
    diag.setdefault("injectivity", "not-run")

    timed_out = False
    if screened is None or cfg.sample_screened:
        try:
            search.run(witness_seeds(net, cfg))
        except _Timeout:
            timed_out = True
    diag["samples"] = len(search.probes)
    diag["solver_failures"] = search.failures
    diag["timed_out"] = timed_out
    diag["degenerate_continuum_samples"] = sum(1 for p in search.probes if p.result.status == "degenerate-continuum")
    diag["root_counts"] = {str(k): v for k, v in sorted(Counter(p.total for p in search.probes).items())}

    violations = _violations(sd, screened or "", diag, search.probes)
    best = search.best()
    witness = None
    if best is not None:
        best, same = _revalidate(sd, best)
        if not same:
            violations.append("revalidation-mismatch")
        witness = best.to_json()
        witness["revalidated"] = same

    if screened is not None:
        stage = screened
    elif best is not None and best.score()[0]:
        stage = "multistable"
    elif best is not None and best.nondegenerate >= 2:
        stage = "multistationary"
    elif timed_out:
        stage = "timed-out"
    else:
        stage = "no-multistationarity-found"
    return NetworkVerdictRecord(
        index, net.one_line(), canonical, stage, sd.s, sd.m, sd.rank, witness, diag, violations,
        round(time.monotonic() - start, 3),
    )
