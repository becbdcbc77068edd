"""Known graphical structure: adjacency validation and per-column supports.

The selection matrix that picks the allowed nonzeros of a column is never
materialized; a :class:`SelectionMap` holds its sorted index list instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotBinary,
    NotSquare,
    NotSymmetric,
)


@dataclass(frozen=True)
class SelectionMap:
    """Support of one column of the precision matrix.

    Attributes
    ----------
    column : int
        Column index ``i``.
    support : ndarray of int
        Sorted indices of the allowed nonzeros of column ``i``.
    pivot : int
        Position of ``i`` inside ``support``.
    """

    column: int
    support: np.ndarray
    pivot: int

    @property
    def size(self) -> int:
        return len(self.support)

    def indicator(self) -> np.ndarray:
        """Unit vector of length ``size`` with a one at ``pivot``."""
        f = np.zeros(self.size)
        f[self.pivot] = 1.0
        return f


class GraphStructure:
    """Validated undirected graph on ``p`` nodes with self-loops forced.

    Build one with :meth:`from_adjacency`, :meth:`from_edges` or
    :meth:`from_supports`; the constructor itself does no validation.
    """

    __slots__ = ("_supports",)

    def __init__(self, supports: Sequence[np.ndarray]):
        self._supports = tuple(supports)

    @classmethod
    def from_adjacency(cls, a) -> GraphStructure:
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotSquare(f"adjacency must be square, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            bad = np.argwhere((a != 0) & (a != 1))[0]
            raise NotBinary(f"adjacency entry {tuple(bad)} is not 0 or 1")
        if not np.array_equal(a, a.T):
            bad = np.argwhere(a != a.T)[0]
            raise NotSymmetric(f"adjacency is not symmetric at {tuple(bad)}")
        mask = a.astype(bool)
        np.fill_diagonal(mask, True)
        return cls([np.flatnonzero(row) for row in mask])

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], p: int) -> GraphStructure:
        """Undirected edge list; the symmetric closure is taken here."""
        nbrs: list[set[int]] = [{i} for i in range(p)]
        for i, j in edges:
            if not (0 <= i < p and 0 <= j < p):
                raise IndexOutOfRange(f"edge ({i}, {j}) outside [0, {p})")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls([np.array(sorted(s), dtype=np.intp) for s in nbrs])

    @classmethod
    def from_supports(cls, supports: Sequence[Sequence[int]]) -> GraphStructure:
        p = len(supports)
        out = []
        for i, sup in enumerate(supports):
            arr = np.asarray(sup, dtype=np.intp)
            if arr.ndim != 1 or np.any(np.diff(arr) <= 0):
                raise ValueError(f"support {i} is not strictly increasing")
            if arr.size and (arr[0] < 0 or arr[-1] >= p):
                raise IndexOutOfRange(f"support {i} has indices outside [0, {p})")
            if i not in set(arr.tolist()):
                raise ValueError(f"support {i} does not contain its own column")
            out.append(arr)
        members = [set(s.tolist()) for s in out]
        for i, sup in enumerate(members):
            for j in sup:
                if i not in members[j]:
                    raise NotSymmetric(f"{j} in support({i}) but {i} not in support({j})")
        return cls(out)

    @classmethod
    def banded(cls, p: int, bandwidth: int) -> GraphStructure:
        """Structure with ``|i - j| < bandwidth`` allowed (``bandwidth >= 1``)."""
        k = bandwidth - 1
        return cls([np.arange(max(0, i - k), min(p, i + k + 1)) for i in range(p)])

    @property
    def p(self) -> int:
        return len(self._supports)

    @property
    def supports(self) -> tuple[np.ndarray, ...]:
        return self._supports

    @property
    def edge_count(self) -> int:
        """Number of undirected edges, self-loops excluded."""
        return (sum(len(s) for s in self._supports) - self.p) // 2

    @property
    def max_support(self) -> int:
        return max((len(s) for s in self._supports), default=0)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.p, self.p), dtype=np.int8)
        for i, sup in enumerate(self._supports):
            a[i, sup] = 1
        np.fill_diagonal(a, 0)
        return a

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphStructure):
            return NotImplemented
        return other.p == self.p and all(np.array_equal(a, b) for a, b in zip(self._supports, other._supports))

    def __hash__(self):
        return hash(tuple(tuple(s.tolist()) for s in self._supports))

    def __repr__(self) -> str:
        return f"GraphStructure(p={self.p}, edges={self.edge_count})"


def selection(g: GraphStructure, i: int) -> SelectionMap:
    if not 0 <= i < g.p:
        raise IndexOutOfRange(f"column {i} outside [0, {g.p})")
    support = g.supports[i]
    pivot = int(np.searchsorted(support, i))
    return SelectionMap(column=int(i), support=support, pivot=pivot)


def extract_submatrix(s, sel: SelectionMap) -> np.ndarray:
    """Rows and columns of ``s`` restricted to the support of ``sel``."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {s.shape}")
    if sel.size and sel.support[-1] >= s.shape[0]:
        raise DimensionMismatch(
            f"support index {sel.support[-1]} outside a {s.shape[0]}x{s.shape[0]} matrix"
        )
    return s[np.ix_(sel.support, sel.support)]


def scatter_column(values, sel: SelectionMap, p: int) -> np.ndarray:
    """Place ``values`` at the support positions of a zero ``p``-vector."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (sel.size,):
        raise DimensionMismatch(
            f"expected {sel.size} values for this support, got shape {values.shape}"
        )
    if sel.size and sel.support[-1] >= p:
        raise DimensionMismatch(f"support does not fit in length {p}")
    out = np.zeros(p)
    out[sel.support] = values
    return out
