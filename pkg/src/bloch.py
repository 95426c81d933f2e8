from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .errors import DimensionError, ValidationError
from .matcore import ComplexMatrix, TripartiteState
from .su_basis import build_basis

IMAG_RESIDUE_TOL = 1e-9

TENSOR_NAMES = ("T1", "T2", "T3", "T12", "T13", "T23", "T123")


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class CorrelationTensors:
    """All one-, two- and three-body correlation tensors of a tripartite state.

    Indices are 0-based generator positions: T12[i1, i2], T13[i1, i3],
    T23[i2, i3], T123[i1, i2, i3].
    """

    d: int
    T1: np.ndarray
    T2: np.ndarray
    T3: np.ndarray
    T12: np.ndarray
    T13: np.ndarray
    T23: np.ndarray
    T123: np.ndarray

    def __post_init__(self) -> None:
        n = self.d * self.d - 1
        shapes = {1: (n,), 2: (n, n), 3: (n, n, n)}
        for name in TENSOR_NAMES:
            arr = np.asarray(getattr(self, name))
            want = shapes[len(name) - 1]
            if arr.shape != want:
                raise DimensionError(f"{name} must have shape {want} for d={self.d}, got {arr.shape}")
            object.__setattr__(self, name, _frozen(arr))

    @classmethod
    def from_cube(cls, d: int, cube: np.ndarray) -> "CorrelationTensors":
        c = np.asarray(cube, dtype=np.float64)
        return cls(
            d=d,
            T1=c[1:, 0, 0],
            T2=c[0, 1:, 0],
            T3=c[0, 0, 1:],
            T12=c[1:, 1:, 0],
            T13=c[1:, 0, 1:],
            T23=c[0, 1:, 1:],
            T123=c[1:, 1:, 1:],
        )

    @classmethod
    def zeros(cls, d: int) -> "CorrelationTensors":
        c = np.zeros((d * d,) * 3)
        c[0, 0, 0] = 1.0
        return cls.from_cube(d, c)

    def cube(self) -> np.ndarray:
        n1 = self.d * self.d
        c = np.zeros((n1, n1, n1))
        c[0, 0, 0] = 1.0
        c[1:, 0, 0] = self.T1
        c[0, 1:, 0] = self.T2
        c[0, 0, 1:] = self.T3
        c[1:, 1:, 0] = self.T12
        c[1:, 0, 1:] = self.T13
        c[0, 1:, 1:] = self.T23
        c[1:, 1:, 1:] = self.T123
        return c

    def one_body(self, party: int) -> np.ndarray:
        return {1: self.T1, 2: self.T2, 3: self.T3}[party]

    def two_body(self, p: int, q: int) -> np.ndarray:
        """Tensor indexed [i_p, i_q] for p < q."""
        return {(1, 2): self.T12, (1, 3): self.T13, (2, 3): self.T23}[(p, q)]


def full_correlation_cube(s: TripartiteState) -> np.ndarray:
    """C[a, b, c] = tr(rho L_a (x) L_b (x) L_c), with L_0 = I and L_i the generators."""
    d = s.d
    ops = build_basis(d).with_identity()  # (a, i, x) = L_a[i, x]
    r = s.rho.reshape((d,) * 6)  # (x, y, z, i, j, k)

    # tr(rho O) = sum rho[xyz, ijk] O[ijk, xyz]
    u = np.tensordot(ops, r, axes=([2, 1], [0, 3]))  # (a, y, z, j, k)
    u = np.tensordot(ops, u, axes=([2, 1], [1, 3]))  # (b, a, z, k)
    u = np.tensordot(ops, u, axes=([2, 1], [2, 3]))  # (c, b, a)
    c = u.transpose(2, 1, 0)

    residue = float(np.max(np.abs(c.imag)))
    if residue > IMAG_RESIDUE_TOL:
        raise ValidationError(f"Correlation tensors have imaginary residue {residue:.3e}; state not Hermitian?")
    return np.ascontiguousarray(c.real)


def decompose(s: TripartiteState) -> CorrelationTensors:
    return CorrelationTensors.from_cube(s.d, full_correlation_cube(s))


def reconstruct_matrix(t: CorrelationTensors) -> ComplexMatrix:
    """Density matrix with the expansion weights 1/d for I and 1/2 for each generator."""
    d = t.d
    ops = build_basis(d).with_identity()
    w = np.full(d * d, 0.5)
    w[0] = 1.0 / d
    coef = t.cube() * w[:, None, None] * w[None, :, None] * w[None, None, :]

    u = np.tensordot(coef, ops, axes=([0], [0]))  # (b, c, x, i)
    u = np.tensordot(u, ops, axes=([0], [0]))  # (c, x, i, y, j)
    u = np.tensordot(u, ops, axes=([0], [0]))  # (x, i, y, j, z, k)
    n = d**3
    return np.ascontiguousarray(u.transpose(0, 2, 4, 1, 3, 5)).reshape(n, n)


def reconstruct(t: CorrelationTensors) -> TripartiteState:
    return TripartiteState(t.d, reconstruct_matrix(t))


def tensor_norms(t: CorrelationTensors) -> Dict[str, float]:
    return {name: float(np.linalg.norm(getattr(t, name).ravel())) for name in TENSOR_NAMES}


def one_body_bound(d: int) -> float:
    return 2.0 * (d - 1) / d


def two_body_bound(d: int) -> float:
    return 4.0 * (d * d - 1) / (d * d)


def two_body_purity_sum(ta: np.ndarray, tb: np.ndarray, tab: np.ndarray) -> float:
    return float(np.sum(ta**2) + np.sum(tb**2) + np.sum(tab**2))


def is_permutation_invariant(t: CorrelationTensors, tol: float = 1e-10) -> bool:
    checks = [
        np.max(np.abs(t.T1 - t.T2)),
        np.max(np.abs(t.T1 - t.T3)),
        np.max(np.abs(t.T12 - t.T13)),
        np.max(np.abs(t.T12 - t.T23)),
        np.max(np.abs(t.T12 - t.T12.T)),
    ]
    for perm in itertools.permutations(range(3)):
        checks.append(np.max(np.abs(t.T123 - t.T123.transpose(perm))))
    return bool(max(float(x) for x in checks) <= tol)


def tensor_distance(a: CorrelationTensors, b: CorrelationTensors) -> float:
    """Frobenius distance over all seven tensors."""
    if a.d != b.d:
        raise DimensionError(f"Cannot compare tensors for d={a.d} and d={b.d}")
    return float(np.linalg.norm(a.cube() - b.cube()))
