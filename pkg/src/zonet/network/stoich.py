"""Stoichiometric and reactant matrices, rank and conservation laws."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from zonet import linalg
from zonet.network.core import NetworkError, ReactionNetwork


@dataclass(frozen=True)
class StoichiometricData:
    """Matrices derived from a network.

    Attributes
    ----------
    N : s x m integer stoichiometric matrix (product minus reactant).
    Y : s x m integer reactant matrix.
    rank : rank of ``N``.
    W : d x s conservation-law matrix in reduced row echelon form, d = s - rank.
    leading : 0-based leading index of each row of ``W``.
    """

    network: ReactionNetwork
    N: tuple[tuple[int, ...], ...]
    Y: tuple[tuple[int, ...], ...]
    rank: int
    W: tuple[tuple[Fraction, ...], ...]
    leading: tuple[int, ...]

    @property
    def s(self) -> int:
        return self.network.s

    @property
    def m(self) -> int:
        return self.network.m

    @property
    def d(self) -> int:
        return self.s - self.rank

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.N)


def stoichiometric_data(net: ReactionNetwork) -> StoichiometricData:
    s, m = net.s, net.m
    N = tuple(
        tuple(rx.product.coefficients[i] - rx.reactant.coefficients[i] for rx in net.reactions)
        for i in range(s)
    )
    Y = tuple(tuple(rx.reactant.coefficients[i] for rx in net.reactions) for i in range(s))
    for j in range(m):
        if all(N[i][j] == 0 for i in range(s)):
            raise NetworkError(f"reaction {j + 1} has a zero stoichiometric column")
    r = linalg.rank(N)
    W, leading = linalg.left_kernel_rref(N, s)
    return StoichiometricData(
        network=net,
        N=N,
        Y=Y,
        rank=r,
        W=tuple(tuple(row) for row in W),
        leading=tuple(leading),
    )
