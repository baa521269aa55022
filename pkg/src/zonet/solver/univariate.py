"""Exact real-root isolation for univariate polynomials over the rationals.

Polynomials are coefficient lists, constant term first.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list  # of int or Fraction, constant term first


def trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def primitive(p: Sequence) -> list[int]:
    """Scale to coprime integers with a positive leading coefficient."""
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        d = Fraction(c).denominator
        den = den * d // gcd(den, d)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> list:
    return [k * c for k, c in enumerate(p)][1:]


def divmod_poly(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lb
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = trim(a)
    return trim(q), a


def poly_gcd(a: Sequence, b: Sequence) -> list[int]:
    a, b = primitive(a), primitive(b)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, primitive(r)
    return primitive(a)


def squarefree(p: Sequence) -> list[int]:
    p = primitive(p)
    if len(p) <= 2:
        return p
    g = poly_gcd(p, derivative(p))
    if len(g) <= 1:
        return p
    q, r = divmod_poly(p, g)
    assert not r
    return primitive(q)


def strip_zero_roots(p: Sequence) -> list:
    p = trim(p)
    k = 0
    while k < len(p) and p[k] == 0:
        k += 1
    return p[k:]


def sturm_sequence(p: Sequence) -> list[list[int]]:
    seq = [primitive(p)]
    d = primitive(derivative(seq[0]))
    if not d:
        return seq
    seq.append(d)
    while True:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            break
        # primitive() forces a positive leading coefficient; keep -r's sign.
        neg = [-c for c in r]
        pr = primitive(neg)
        if Fraction(neg[-1]) < 0:
            pr = [-c for c in pr]
        seq.append(pr)
    return seq


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq: Sequence[Sequence[int]], a, b) -> int:
    """Distinct real roots in (a, b] for the Sturm sequence of a square-free poly."""
    return _sign_changes([evaluate(q, a) for q in seq]) - _sign_changes([evaluate(q, b) for q in seq])


def cauchy_bound(p: Sequence) -> Fraction:
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lead for c in p[:-1]), default=Fraction(0))


def isolate_positive_roots(p: Sequence, width: Fraction = Fraction(1, 10**12)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (a, b], 0 <= a, each holding exactly one positive root.

    Intervals are refined by bisection until ``b - a <= width``; an exact
    rational root is returned as the degenerate interval (r, r).
    """
    p = squarefree(strip_zero_roots(p))
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    bound = cauchy_bound(p)
    stack = [(Fraction(0), bound)]
    isolated = []
    while stack:
        a, b = stack.pop()
        n = count_roots(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            isolated.append((a, b))
            continue
        mid = (a + b) / 2
        stack.append((mid, b))
        stack.append((a, mid))
    out = [refine_root(p, a, b, width) for a, b in isolated]
    return sorted(out)


def refine_root(p: Sequence, a: Fraction, b: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink (a, b] holding one simple root of square-free ``p`` by bisection."""
    fb = evaluate(p, b)
    if fb == 0:
        return (b, b)
    # With one simple root r in (a, b], points right of r share the sign of
    # p(b) and points left of it do not, even when p(a) = 0.
    while b - a > width:
        mid = (a + b) / 2
        fm = evaluate(p, mid)
        if fm == 0:
            return (mid, mid)
        if (fm > 0) == (fb > 0):
            b, fb = mid, fm
        else:
            a = mid
    return (a, b)
