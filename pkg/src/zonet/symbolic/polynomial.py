"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial lives in a fixed :class:`Universe` of named variables and stores
its terms as a dict from dense exponent tuples to nonzero ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]

_GREEK = {"kappa": "κ", "lambda": "λ"}
_SUBSCRIPT = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


@dataclass(frozen=True)
class Universe:
    """An ordered tuple of variable names.

    Names have the form ``<family><index>`` such as ``kappa3`` or ``x1``.
    The standard families, in order, are kappa, x, p, lambda, c.
    """

    names: tuple[str, ...]

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    @classmethod
    def standard(cls, m: int = 0, s: int = 0, p: int = 0, t: int = 0, d: int = 0) -> "Universe":
        names = (
            [f"kappa{j + 1}" for j in range(m)]
            + [f"x{i + 1}" for i in range(s)]
            + [f"p{i + 1}" for i in range(p)]
            + [f"lambda{k + 1}" for k in range(t)]
            + [f"c{k + 1}" for k in range(d)]
        )
        return cls(tuple(names))

    @classmethod
    def of(cls, *names: str) -> "Universe":
        return cls(tuple(names))

    def zero(self) -> "SparsePolynomial":
        return SparsePolynomial(self, {})

    def const(self, value) -> "SparsePolynomial":
        value = Fraction(value)
        if value == 0:
            return self.zero()
        return SparsePolynomial(self, {(0,) * len(self.names): value})

    def var(self, name: str) -> "SparsePolynomial":
        e = [0] * len(self.names)
        e[self.index[name]] = 1
        return SparsePolynomial(self, {tuple(e): Fraction(1)})

    def monomial(self, powers: Mapping[str, int], coeff=1) -> "SparsePolynomial":
        e = [0] * len(self.names)
        for name, k in powers.items():
            e[self.index[name]] += k
        return SparsePolynomial(self, {tuple(e): Fraction(coeff)} if coeff else {})

    def pretty_name(self, name: str) -> str:
        head = name.rstrip("0123456789")
        tail = name[len(head):]
        return _GREEK.get(head, head) + tail.translate(_SUBSCRIPT)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class SparsePolynomial:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("universe", "terms", "_hash")

    def __init__(self, universe: Universe, terms: Mapping[Exponent, Fraction] | None = None):
        self.universe = universe
        if terms:
            self.terms = {e: Fraction(c) for e, c in terms.items() if c != 0}
        else:
            self.terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, universe: Universe, terms: dict[Exponent, Fraction]) -> "SparsePolynomial":
        obj = cls.__new__(cls)
        obj.universe = universe
        obj.terms = terms
        obj._hash = None
        return obj

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.universe), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = self.universe.index[name]
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> list[str]:
        used = [False] * len(self.universe)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return [n for n, u in zip(self.universe.names, used) if u]

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded lexicographic order, largest first."""
        return sorted(self.terms.items(), key=lambda it: (sum(it[0]), it[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.universe != self.universe:
                raise ValueError("polynomials live in different universes")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return self.universe.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return SparsePolynomial._raw(self.universe, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial._raw(self.universe, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            other = Fraction(other)
            if other == 0:
                return self.universe.zero()
            return SparsePolynomial._raw(self.universe, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return SparsePolynomial._raw(self.universe, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.universe.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePolynomial):
            return self.universe == other.universe and self.terms == other.terms
        if isinstance(other, (int, Fraction, Rational)):
            return self == self.universe.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.universe, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution ---------------------------------------
    def diff(self, name: str) -> "SparsePolynomial":
        i = self.universe.index[name]
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return SparsePolynomial._raw(self.universe, out)

    def subs(self, assignment: Mapping[str, object]) -> "SparsePolynomial":
        """Substitute rationals for some variables; the universe is kept."""
        idx = [(self.universe.index[n], Fraction(v)) for n, v in assignment.items()]
        out: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            e = list(e)
            for i, val in idx:
                if e[i]:
                    c = c * val ** e[i]
                    e[i] = 0
            if c:
                t = tuple(e)
                out[t] = out.get(t, 0) + c
        return SparsePolynomial(self.universe, out)

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate with every used variable assigned; exact for rationals.

        Values may also be floats or any type supporting + and * (such as
        intervals); the result then has that type.
        """
        total = 0
        names = self.universe.names
        cache: dict[tuple[int, int], object] = {}
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    pw = cache.get(key)
                    if pw is None:
                        pw = assignment[names[i]] ** k if k > 1 else assignment[names[i]]
                        cache[key] = pw
                    term = term * pw
            total = total + term
        return total

    def substitute_poly(self, mapping: Mapping[str, "SparsePolynomial"]) -> "SparsePolynomial":
        """Replace variables by polynomials in the same universe."""
        result = self.universe.zero()
        idx = {self.universe.index[n]: p for n, p in mapping.items()}
        cache: dict[tuple[int, int], SparsePolynomial] = {}
        for e, c in self.terms.items():
            rest = list(e)
            term = None
            for i, p in idx.items():
                if rest[i]:
                    key = (i, rest[i])
                    if key not in cache:
                        cache[key] = p ** rest[i]
                    term = cache[key] if term is None else term * cache[key]
                    rest[i] = 0
            mono = SparsePolynomial._raw(self.universe, {tuple(rest): c})
            result = result + (mono if term is None else mono * term)
        return result

    def restrict(self, universe: Universe) -> "SparsePolynomial":
        """Re-express in another universe containing every used variable."""
        pos = []
        for i, n in enumerate(self.universe.names):
            pos.append(universe.index.get(n))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(universe)
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise ValueError(f"variable {self.universe.names[i]} missing from target universe")
                    ne[j] = k
            out[tuple(ne)] = c
        return SparsePolynomial._raw(universe, out)

    # -- division ----------------------------------------------------------
    def leading(self) -> tuple[Exponent, Fraction]:
        """Lexicographic leading term (by universe order)."""
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, other: "SparsePolynomial") -> "SparsePolynomial":
        """Divide by ``other``; raises ``ArithmeticError`` if not exact."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if len(other.terms) == 1:
            (oe, oc), = other.terms.items()
            out = {}
            for e, c in self.terms.items():
                ne = tuple(a - b for a, b in zip(e, oe))
                if min(ne, default=0) < 0:
                    raise ArithmeticError("inexact polynomial division")
                out[ne] = c / oc
            return SparsePolynomial._raw(self.universe, out)
        le, lc = other.leading()
        rem = dict(self.terms)
        quot: dict[Exponent, Fraction] = {}
        while rem:
            e = max(rem)
            c = rem[e]
            qe = tuple(a - b for a, b in zip(e, le))
            if min(qe) < 0:
                raise ArithmeticError("inexact polynomial division")
            qc = c / lc
            quot[qe] = qc
            for oe, oc in other.terms.items():
                te = tuple(a + b for a, b in zip(qe, oe))
                v = rem.get(te, 0) - qc * oc
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return SparsePolynomial._raw(self.universe, quot)

    # -- sign profile and output ------------------------------------------
    def sign_profile(self) -> str:
        if not self.terms:
            return "zero"
        signs = {c > 0 for c in self.terms.values()}
        if signs == {True}:
            return "all-positive"
        if signs == {False}:
            return "all-negative"
        return "mixed"

    def to_json(self) -> list[dict]:
        return [
            {"exponents": list(e), "numerator": c.numerator, "denominator": c.denominator}
            for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, universe: Universe, data: Iterable[Mapping]) -> "SparsePolynomial":
        return cls(universe, {tuple(d["exponents"]): Fraction(d["numerator"], d["denominator"]) for d in data})

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "".join(
                self.universe.pretty_name(n) + ("" if k == 1 else f"^{k}")
                for n, k in zip(self.universe.names, e)
                if k
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}{mono}" if mag.denominator == 1 else f"({mag}){mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"SparsePolynomial({self.pretty()})"


def poly_sum(polys: Iterable[SparsePolynomial], universe: Universe) -> SparsePolynomial:
    out: dict[Exponent, Fraction] = {}
    for p in polys:
        for e, c in p.terms.items():
            out[e] = out.get(e, 0) + c
    return SparsePolynomial(universe, out)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _cofactor_det(a: Sequence[Sequence[SparsePolynomial]], universe: Universe) -> SparsePolynomial:
    n = len(a)
    total = universe.zero()
    for perm in permutations(range(n)):
        term = None
        for i, j in enumerate(perm):
            entry = a[i][j]
            if entry.is_zero():
                term = None
                break
            term = entry if term is None else term * entry
        else:
            if term is not None:
                total = total + (term if _perm_sign(perm) > 0 else -term)
    return total


def _bareiss_det(a: Sequence[Sequence[SparsePolynomial]], universe: Universe) -> SparsePolynomial:
    m = [list(row) for row in a]
    n = len(m)
    sign = 1
    prev = universe.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return universe.zero()
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev) if not num.is_zero() else num
        prev = m[k][k]
    out = m[n - 1][n - 1]
    return out if sign > 0 else -out


def determinant(a: Sequence[Sequence[SparsePolynomial]], universe: Universe | None = None) -> SparsePolynomial:
    """Determinant of a square polynomial matrix.

    Cofactor expansion up to size 4, fraction-free Bareiss elimination above.
    """
    n = len(a)
    if universe is None:
        universe = a[0][0].universe
    if n == 0:
        return universe.const(1)
    if n <= 4:
        return _cofactor_det(a, universe)
    return _bareiss_det(a, universe)
