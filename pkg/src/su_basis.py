from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .errors import DimensionError
from .matcore import ComplexMatrix


@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """Ordered generalized Gell-Mann generators of su(d).

    Generator index i runs 1..d^2-1: first the d-1 diagonal ones, then the
    symmetric |j><k| + |k><j| for j<k, then the antisymmetric
    -i(|j><k| - |k><j|) in the same (j, k) order.
    """

    d: int
    stack: np.ndarray  # (d^2-1, d, d), read-only
    pairs: Tuple[Tuple[int, int], ...]

    def __len__(self) -> int:
        return self.stack.shape[0]

    def generator(self, index: int) -> ComplexMatrix:
        if not 1 <= index <= len(self):
            raise IndexError(f"Generator index {index} outside 1..{len(self)}")
        return self.stack[index - 1]

    @property
    def generators(self) -> Tuple[ComplexMatrix, ...]:
        return tuple(self.stack)

    def kind(self, index: int) -> str:
        lo, _ = antisym_range(self.d)
        if index < self.d:
            return "diagonal"
        if index < lo:
            return "symmetric"
        return "antisymmetric"

    def with_identity(self) -> np.ndarray:
        """(d^2, d, d) stack with the identity prepended at position 0."""
        return _with_identity(self.d)

    def gram(self) -> np.ndarray:
        return np.einsum("aij,bji->ab", self.stack, self.stack)


def _pairs(d: int) -> List[Tuple[int, int]]:
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


@lru_cache(maxsize=None)
def _build(d: int) -> GellMannBasis:
    gens: List[np.ndarray] = []

    for l in range(d - 1):
        g = np.zeros((d, d), dtype=np.complex128)
        coef = math.sqrt(2.0 / ((l + 1) * (l + 2)))
        for a in range(l + 1):
            g[a, a] = coef
        g[l + 1, l + 1] = -(l + 1) * coef
        gens.append(g)

    pairs = _pairs(d)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = g[k, j] = 1.0
        gens.append(g)
    for j, k in pairs:
        g = np.zeros((d, d), dtype=np.complex128)
        g[j, k] = -1j
        g[k, j] = 1j
        gens.append(g)

    stack = np.array(gens)
    stack.setflags(write=False)
    return GellMannBasis(d=d, stack=stack, pairs=tuple(pairs))


@lru_cache(maxsize=None)
def _with_identity(d: int) -> np.ndarray:
    ops = np.concatenate([np.eye(d, dtype=np.complex128)[None], _build(d).stack])
    ops.setflags(write=False)
    return ops


def build_basis(d: int) -> GellMannBasis:
    if int(d) != d or d < 2:
        raise DimensionError(f"Gell-Mann basis needs d >= 2, got {d}")
    return _build(int(d))


def antisym_range(d: int) -> Tuple[int, int]:
    """Closed 1-based interval of antisymmetric generator indices."""
    if d < 2:
        raise DimensionError(f"Gell-Mann basis needs d >= 2, got {d}")
    return d * (d + 1) // 2, d * d - 1


def antisym_slice(d: int) -> slice:
    """0-based array slice over the antisymmetric generators."""
    lo, hi = antisym_range(d)
    return slice(lo - 1, hi)
