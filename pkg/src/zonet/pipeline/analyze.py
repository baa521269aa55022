"""Full report for a single network, dispatched on its rank."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from zonet.fluxcone import extreme_rays, strictly_positive_flux_exists
from zonet.lowdim import (
    classify_conservation_pair,
    degeneracy_verdict,
    is_maximum,
    two_species_reduce,
    two_species_verdict,
)
from zonet.network.core import ReactionNetwork
from zonet.network.stoich import stoichiometric_data
from zonet.onedim import analyze_one_dim, one_dim_full_verdict
from zonet.sign import fast_sign_report, injectivity_screen
from zonet.solver.steady import SolveResult, SteadyStateProblem

REPORT_SCHEMA = "zonet.analysis/1"


class UsageError(ValueError):
    """Arguments that do not fit the network (wrong vector lengths and the like)."""


class UnsupportedNetwork(ValueError):
    pass


SIGN_HEADLINES = {
    "positive-certified": "positive-certified: at most one nondegenerate positive steady state per class",
    "zero-polynomial": "degenerate-continuum: every positive steady state is degenerate",
    "no-positive-flux": "no positive steady states: the flux cone has no strictly positive vector",
    "inconclusive": "inconclusive: the sign criterion does not certify det Jac_h > 0",
}


def _point(x: Sequence) -> str:
    return "(" + ",".join(f"{float(v.mid):.10g}" for v in x) + ")"


def _solver_headline(result: SolveResult) -> str:
    if result.status == "degenerate-continuum":
        return "degenerate-continuum: infinitely many positive steady states at these parameters"
    sols = result.solutions
    if not sols:
        return "no positive steady states at these parameters"
    if len(sols) == 1 and sols[0].nondegenerate and sols[0].stability == "stable":
        return f"exactly one stable positive steady state {_point(sols[0].x)}"
    stable = len(result.stable)
    nondeg = len(result.nondegenerate)
    points = ", ".join(_point(s.x) for s in sols)
    return f"{len(sols)} positive steady states ({nondeg} nondegenerate, {stable} stable): {points}"


def _fractions(values: Sequence | None, expected: int, what: str) -> list[Fraction] | None:
    if values is None:
        return None
    out = [Fraction(v) for v in values]
    if len(out) != expected:
        raise UsageError(f"expected {expected} {what}, got {len(out)}")
    return out


def analyze_network(net: ReactionNetwork, kappa: Sequence | None = None, c: Sequence | None = None) -> dict:
    """JSON-ready report with a one-line ``headline``."""
    if net.s > 4:
        raise UnsupportedNetwork(f"networks with {net.s} species are out of scope (at most 4)")
    sd = stoichiometric_data(net)
    kappa = _fractions(kappa, sd.m, "rate constants")
    c = _fractions(c, sd.d, "total constants")
    if kappa is not None and any(k <= 0 for k in kappa):
        raise UsageError("rate constants must be positive")
    if kappa is not None and c is None and sd.d > 0:
        raise UsageError(f"the network has {sd.d} conservation laws; pass --c with {sd.d} values")
    rays = extreme_rays(sd)
    report: dict = {
        "schema": REPORT_SCHEMA,
        "network": net.one_line(),
        "species": list(net.species),
        "reactions": sd.m,
        "rank": sd.rank,
        "conservation_laws": [[str(v) for v in row] for row in sd.W],
        "flux_cone": {
            "t": rays.t,
            "positive_flux": strictly_positive_flux_exists(rays),
            "rays": [list(r) for r in rays.rays],
        },
    }
    if kappa is not None:
        report["kappa"] = [str(k) for k in kappa]
    if c is not None:
        report["c"] = [str(v) for v in c]
    headline = None

    if sd.rank == 1:
        if not net.zero_one:
            raise UnsupportedNetwork("the rank-one classifier needs a zero-one network")
        st = analyze_one_dim(sd)
        report["one_dim"] = {
            "pivot": net.species[st.pivot],
            "multipliers": list(st.a),
            "rows_change_sign": st.all_rows_change_sign,
            "region": st.region_text(net.species),
        }
        if kappa is not None:
            verdict = one_dim_full_verdict(sd, kappa, c)
            report["one_dim"]["verdict"] = verdict.to_json()
            if verdict.answer == "one-stable-steady-state":
                headline = f"exactly one stable positive steady state {_point(verdict.steady_state.x)}"
            elif verdict.answer == "no-positive-class":
                headline = "no positive steady states: the positive compatibility class is empty"
            else:
                headline = "no positive steady states for any parameters"
        elif st.all_rows_change_sign:
            headline = "exactly one stable positive steady state in every nonempty positive class"
        else:
            headline = "no positive steady states for any parameters"
        report["headline"] = headline
        return report

    if sd.rank == 2:
        sign = fast_sign_report(sd, rays)
        report["sign"] = sign.to_json()
        headline = SIGN_HEADLINES[sign.verdict]
        if sd.s == 2 and net.zero_one:
            red = two_species_reduce(net)
            report["quadratic"] = {
                "present_slots": sorted(red.K1),
                "C1": red.reduced[0].pretty(),
                "C2": red.reduced[1].pretty(),
                "C3": red.reduced[2].pretty(),
            }
            if kappa is not None:
                verdict = two_species_verdict(red, kappa)
                report["quadratic"]["verdict"] = verdict
                report["quadratic"]["coefficients"] = [str(v) for v in red.coefficients_at(kappa)]
        if sd.s == 3 and net.zero_one:
            deg = degeneracy_verdict(sd, rays)
            report["degeneracy"] = deg.verdict
            if is_maximum(net):
                report["maximum"] = classify_conservation_pair(sd).to_json()
    else:
        inj = injectivity_screen(SteadyStateProblem(sd).ss, sd)
        report["injectivity"] = {"verdict": inj.verdict, "screen": inj.screen, "profiles": inj.profiles}
        if not report["flux_cone"]["positive_flux"]:
            headline = SIGN_HEADLINES["no-positive-flux"]
        elif inj.verdict == "injective":
            headline = "injective: at most one positive steady state per class"
        else:
            headline = "injectivity undetermined: pass --kappa to solve at fixed parameters"

    if kappa is not None:
        result = SteadyStateProblem(sd).solve(kappa, c)
        report["solve"] = {"status": result.status, "steady_states": [s.to_json() for s in result.solutions]}
        if sd.rank >= 3:
            report["solve"]["hurwitz"] = [
                [str(v) if not hasattr(v, "mid") else f"{float(v.mid):.12g}" for v in s.hurwitz.hurwitz_determinants]
                for s in result.solutions if s.hurwitz is not None
            ]
        headline = _solver_headline(result)
        quad = report.get("quadratic", {})
        if quad.get("verdict") == "degenerate-continuum":
            headline = "degenerate-continuum: infinitely many positive steady states at these parameters"
    report["headline"] = headline
    return report
