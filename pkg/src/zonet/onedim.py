"""Complete decision procedure for rank-one zero-one networks.

Every row of N is a_i times the pivot row with a_i in {-1, 0, 1}. Using the
conservation laws x_i = a_i x_p + c_i, the positive compatibility class is
nonempty iff c_k > 0 for a_k in {-1, 0} and c_i + c_j > 0 whenever a_i = 1,
a_j = -1. If the pivot row has entries of both signs, every nonempty class
holds exactly one positive steady state and it is stable; otherwise there is
no positive steady state at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from zonet.network.stoich import StoichiometricData


@dataclass(frozen=True)
class OneDimStructure:
    """Indices are 0-based species positions.

    ``others`` lists the non-pivot species in the order of the conservation
    rows, so the i-th total constant belongs to ``others[i]``.
    """

    pivot: int
    a: tuple[int, ...]
    J1: frozenset[int]
    J2: frozenset[int]
    J3: frozenset[int]
    all_rows_change_sign: bool
    others: tuple[int, ...]

    def region(self) -> list[tuple[dict[int, int], str, int]]:
        """Linear inequalities over c (keys are positions in ``others``)."""
        pos = {sp: k for k, sp in enumerate(self.others)}
        out = []
        for k in sorted(self.J2 | self.J3):
            out.append(({pos[k]: 1}, ">", 0))
        for i in sorted(self.J1):
            for j in sorted(self.J2):
                out.append(({pos[i]: 1, pos[j]: 1}, ">", 0))
        return out

    def region_text(self, names: Sequence[str] | None = None) -> list[str]:
        def cname(k):
            sp = self.others[k]
            return f"c[{names[sp]}]" if names else f"c{k + 1}"

        return [" + ".join(cname(k) for k in lhs) + f" {op} {rhs}" for lhs, op, rhs in self.region()]


def analyze_one_dim(sd: StoichiometricData) -> OneDimStructure:
    if sd.rank != 1:
        raise ValueError(f"network has rank {sd.rank}, not 1")
    if not sd.network.zero_one:
        raise ValueError("the rank-one classifier needs a zero-one network")
    nonzero = [i for i in range(sd.s) if any(sd.N[i])]
    # The last nonzero row is the pivot: the reduced conservation rows are then
    # exactly x_i - a_i x_p, so c needs no change of basis.
    p = nonzero[-1]
    base = sd.N[p]
    j0 = next(j for j, v in enumerate(base) if v)
    a = []
    for i in range(sd.s):
        coef = Fraction(sd.N[i][j0], base[j0])
        if any(sd.N[i][j] != coef * base[j] for j in range(sd.m)):
            raise ValueError("rows are not multiples of the pivot row")
        if coef not in (-1, 0, 1):
            raise ValueError("row multiple outside {-1, 0, 1}")
        a.append(int(coef))
    others = tuple(i for i in range(sd.s) if i != p)
    expected = []
    for i in others:
        row = [Fraction(0)] * sd.s
        row[i] = Fraction(1)
        row[p] = Fraction(-a[i])
        expected.append(tuple(row))
    if tuple(expected) != sd.W:
        raise AssertionError("conservation rows differ from the pivot convention")
    J1 = frozenset(i for i in others if a[i] == 1)
    J2 = frozenset(i for i in others if a[i] == -1)
    J3 = frozenset(i for i in others if a[i] == 0)
    changes = any(v > 0 for v in base) and any(v < 0 for v in base)
    return OneDimStructure(p, tuple(a), J1, J2, J3, changes, others)


def _constants(structure: OneDimStructure, c: Sequence) -> dict[int, Fraction]:
    if len(c) != len(structure.others):
        raise ValueError(f"expected {len(structure.others)} total constants")
    return {sp: Fraction(v) for sp, v in zip(structure.others, c)}


def in_region(structure: OneDimStructure, c: Sequence) -> bool:
    cc = _constants(structure, c)
    if any(cc[k] <= 0 for k in structure.J2 | structure.J3):
        return False
    return all(cc[i] + cc[j] > 0 for i in structure.J1 for j in structure.J2)


def classify_total_constant(structure: OneDimStructure, c: Sequence) -> str:
    """``no-steady-states``, ``no-positive-class`` or ``one-stable-steady-state``."""
    if not structure.all_rows_change_sign:
        return "no-steady-states"
    if not in_region(structure, c):
        return "no-positive-class"
    return "one-stable-steady-state"


def witness_point(structure: OneDimStructure, c: Sequence) -> tuple[Fraction, ...] | None:
    """A rational point of the positive compatibility class, or None if empty."""
    if not in_region(structure, c):
        return None
    cc = _constants(structure, c)
    min1 = min((cc[i] for i in structure.J1), default=None)
    min2 = min((cc[j] for j in structure.J2), default=None)
    if min2 is None:
        xp = 1 - min(Fraction(0), min1 if min1 is not None else Fraction(0))
    elif min1 is not None and min1 < 0:
        xp = (min2 - min1) / 2
    else:
        xp = min2 / 2
    x = [Fraction(0)] * len(structure.a)
    x[structure.pivot] = xp
    for i in structure.others:
        x[i] = structure.a[i] * xp + cc[i]
    return tuple(x)


@dataclass
class OneDimVerdict:
    kind: str  # no-steady-states-any-c | region-classified
    answer: str  # no-steady-states | no-positive-class | one-stable-steady-state
    region: list[str]
    steady_state: object = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "answer": self.answer, "region": self.region}
        if self.steady_state is not None:
            out["steady_state"] = self.steady_state.to_json()
        return out


def one_dim_full_verdict(sd: StoichiometricData, kappa: Sequence, c: Sequence) -> OneDimVerdict:
    """Classifier verdict plus the certified steady state when one exists."""
    from zonet.solver.steady import SteadyStateProblem

    st = analyze_one_dim(sd)
    names = sd.network.species
    if not st.all_rows_change_sign:
        return OneDimVerdict("no-steady-states-any-c", "no-steady-states", [])
    answer = classify_total_constant(st, c)
    region = st.region_text(names)
    if answer != "one-stable-steady-state":
        return OneDimVerdict("region-classified", answer, region)
    result = SteadyStateProblem(sd).solve(kappa, c)
    if len(result) != 1 or result[0].stability != "stable":
        raise ArithmeticError(
            f"solver found {len(result)} steady states where exactly one stable state is expected"
        )
    return OneDimVerdict("region-classified", answer, region, result[0])
