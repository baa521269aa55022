"""Reaction network types and the plain-text network format."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class NetworkError(ValueError):
    """Raised for malformed or inconsistent network descriptions."""


@dataclass(frozen=True, order=True)
class Complex:
    """Stoichiometric coefficients of one side of a reaction, one per species."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coefficients):
            raise NetworkError(f"negative coefficient in complex {self.coefficients}")

    @property
    def is_zero_one(self) -> bool:
        return all(c in (0, 1) for c in self.coefficients)

    def format(self, names: Sequence[str]) -> str:
        parts = []
        for c, name in zip(self.coefficients, names):
            if c == 1:
                parts.append(name)
            elif c > 1:
                parts.append(f"{c}{name}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True, order=True)
class Reaction:
    reactant: Complex
    product: Complex

    def __post_init__(self):
        if self.reactant == self.product:
            raise NetworkError("reactant equals product")
        if len(self.reactant.coefficients) != len(self.product.coefficients):
            raise NetworkError("reactant and product live on different species sets")

    def format(self, names: Sequence[str]) -> str:
        return f"{self.reactant.format(names)} -> {self.product.format(names)}"

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.reactant.coefficients, self.product.coefficients


@dataclass(frozen=True)
class ReactionNetwork:
    """Species names plus an ordered list of distinct reactions.

    Reaction ``j`` (0-based here, ``j + 1`` in printed output) has rate
    constant ``kappa_{j+1}``.
    """

    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    zero_one: bool = field(default=True)

    def __post_init__(self):
        if len(self.species) < 1:
            raise NetworkError("a network needs at least one species")
        if len(self.reactions) < 1:
            raise NetworkError("a network needs at least one reaction")
        if len(set(self.species)) != len(self.species):
            raise NetworkError("duplicate species name")
        seen = set()
        for j, rxn in enumerate(self.reactions):
            if len(rxn.reactant.coefficients) != len(self.species):
                raise NetworkError(f"reaction {j + 1} has the wrong number of species")
            if rxn.key in seen:
                raise NetworkError(f"duplicate reaction: {rxn.format(self.species)}")
            seen.add(rxn.key)
            if self.zero_one and not (rxn.reactant.is_zero_one and rxn.product.is_zero_one):
                raise NetworkError(
                    f"reaction {j + 1} ({rxn.format(self.species)}) is not zero-one; "
                    "pass allow_general=True to accept it"
                )

    @property
    def s(self) -> int:
        return len(self.species)

    @property
    def m(self) -> int:
        return len(self.reactions)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[Sequence[int], Sequence[int]]],
        species: Sequence[str] | None = None,
        zero_one: bool = True,
    ) -> "ReactionNetwork":
        """Build from (reactant, product) coefficient vectors."""
        reactions = tuple(Reaction(Complex(tuple(a)), Complex(tuple(b))) for a, b in pairs)
        if species is None:
            species = tuple(f"X{i + 1}" for i in range(len(reactions[0].reactant.coefficients)))
        return cls(tuple(species), reactions, zero_one)

    def with_reactions(self, reactions: Iterable[Reaction]) -> "ReactionNetwork":
        return ReactionNetwork(self.species, tuple(reactions), self.zero_one)

    def to_text(self, header: bool = True) -> str:
        lines = []
        if header:
            lines.append("species: " + " ".join(self.species))
        lines.extend(r.format(self.species) for r in self.reactions)
        return "\n".join(lines) + "\n"

    def one_line(self) -> str:
        return "; ".join(r.format(self.species) for r in self.reactions)


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_]*)\s*$")
_X_NAME = re.compile(r"^X(\d+)$")


def _parse_complex(text: str, where: str) -> dict[str, int]:
    text = text.strip()
    if text == "0" or text == "":
        if text == "":
            raise NetworkError(f"{where}: empty complex (write 0 for the zero complex)")
        return {}
    coeffs: dict[str, int] = {}
    for term in text.split("+"):
        match = _TERM.match(term)
        if not match:
            raise NetworkError(f"{where}: cannot read species term {term.strip()!r}")
        mult = int(match.group(1)) if match.group(1) else 1
        name = match.group(2)
        coeffs[name] = coeffs.get(name, 0) + mult
    return coeffs


def parse_network(text: str, allow_general: bool = False) -> ReactionNetwork:
    """Parse the plain-text network format.

    One reaction per line or ``;``-separated; ``0`` is the zero complex;
    ``<->`` expands to the forward then the backward reaction; ``#`` starts a
    comment; an optional ``species: A B C`` line fixes species order.
    """
    declared: list[str] | None = None
    raw: list[tuple[dict[str, int], dict[str, int], str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        if line.strip().lower().startswith("species:"):
            if declared is not None:
                raise NetworkError(f"line {lineno}: species declared twice")
            declared = line.split(":", 1)[1].split()
            continue
        col = 1
        for chunk in line.split(";"):
            where = f"line {lineno}, column {col}"
            col += len(chunk) + 1
            if not chunk.strip():
                continue
            if "<->" in chunk:
                lhs, rhs = chunk.split("<->", 1)
                reversible = True
            elif "->" in chunk:
                lhs, rhs = chunk.split("->", 1)
                reversible = False
            else:
                raise NetworkError(f"{where}: expected '->' or '<->' in {chunk.strip()!r}")
            if "->" in rhs or "<-" in rhs:
                raise NetworkError(f"{where}: more than one arrow in {chunk.strip()!r}")
            a = _parse_complex(lhs, where)
            b = _parse_complex(rhs, where)
            raw.append((a, b, where))
            if reversible:
                raw.append((b, a, where))
    if not raw:
        raise NetworkError("no reactions found")

    names_seen: list[str] = []
    for a, b, _ in raw:
        for name in list(a) + list(b):
            if name not in names_seen:
                names_seen.append(name)
    if declared is not None:
        unknown = [n for n in names_seen if n not in declared]
        if unknown:
            raise NetworkError(f"undeclared species: {', '.join(unknown)}")
        species = declared
    elif names_seen and all(_X_NAME.match(n) for n in names_seen):
        species = sorted(names_seen, key=lambda n: int(n[1:]))
    else:
        species = names_seen
    if not species:
        raise NetworkError("network mentions no species")

    reactions = []
    seen = {}
    for a, b, where in raw:
        ra = Complex(tuple(a.get(n, 0) for n in species))
        rb = Complex(tuple(b.get(n, 0) for n in species))
        if ra == rb:
            raise NetworkError(f"{where}: reactant equals product")
        if (ra, rb) in seen:
            raise NetworkError(f"{where}: duplicate reaction (first seen at {seen[(ra, rb)]})")
        seen[(ra, rb)] = where
        if not allow_general and not (ra.is_zero_one and rb.is_zero_one):
            raise NetworkError(f"{where}: coefficient above 1 in a zero-one network")
        reactions.append(Reaction(ra, rb))
    zero_one = all(r.reactant.is_zero_one and r.product.is_zero_one for r in reactions)
    return ReactionNetwork(tuple(species), tuple(reactions), zero_one=zero_one)
