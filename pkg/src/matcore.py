from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .errors import ConvergenceError, DimensionError, ValidationError

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]

# Flat basis index of |i1 i2 i3> is i1*d^2 + i2*d + i3 (party 1 most significant).

MAX_SWEEPS = 100
OFF_DIAGONAL_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-9

HERMITIAN_TOL = 1e-12        # states
HERMITIAN_INPUT_TOL = 1e-10  # eigensolver input
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
PERMUTATION_TOL = 1e-8

MAX_LOCAL_DIM = 8

_TRANSPOSITIONS = ((2, 1, 3), (1, 3, 2), (3, 2, 1))


def as_matrix(m: object) -> ComplexMatrix:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"Expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("Matrix has non-finite entries (NaN or Inf)")
    return a


def is_hermitian(m: object, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def kron(a: object, b: object) -> ComplexMatrix:
    return np.kron(as_matrix(a), as_matrix(b))


def frobenius_norm(m: object) -> float:
    a = as_matrix(m)
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2)))


# ---------------------------------------------------------------------- #
# Tripartite states                                                      #
# ---------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """Density matrix on three d-level parties.

    Construction validates Hermiticity, unit trace and (unless ``check_psd`` is
    False) positivity. The stored matrix is a read-only copy.
    """

    d: int
    rho: ComplexMatrix
    check_psd: InitVar[bool] = True

    def __post_init__(self, check_psd: bool) -> None:
        d = int(self.d)
        if d < 2 or d > MAX_LOCAL_DIM:
            raise DimensionError(f"Local dimension must be in [2, {MAX_LOCAL_DIM}], got {self.d}")

        rho = np.array(as_matrix(self.rho), copy=True)
        n = d**3
        if rho.shape != (n, n):
            raise DimensionError(f"rho must be {n}x{n} for d={d}, got {rho.shape[0]}x{rho.shape[1]}")

        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > HERMITIAN_TOL:
            raise ValidationError(
                f"State is not Hermitian: max |rho - rho^dagger| = {herm:.3e} > {HERMITIAN_TOL:g}"
            )

        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"State does not have unit trace: tr(rho) = {tr.real:.17g}{tr.imag:+.3e}j")

        if check_psd:
            lmin = float(hermitian_eigenvalues(rho)[-1])
            if lmin < PSD_TOL:
                raise ValidationError(
                    f"State is not positive semidefinite: smallest eigenvalue {lmin:.3e} < {PSD_TOL:g}"
                )

        rho.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, ket: object, d: int | None = None) -> "TripartiteState":
        v = np.asarray(ket, dtype=np.complex128).reshape(-1)
        if d is None:
            d = _local_dim(v.size)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0 or not math.isfinite(nrm):
            raise ValidationError("Ket must have finite, non-zero norm")
        v = v / nrm
        # rank-1 projector, PSD by construction
        return cls(d, np.outer(v, v.conj()), check_psd=False)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence["TripartiteState"]) -> "TripartiteState":
        w = np.asarray(weights, dtype=np.float64)
        if len(states) == 0 or w.shape != (len(states),):
            raise DimensionError(f"Need one weight per state, got {w.shape} for {len(states)} states")
        if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"Mixture weights must be non-negative and sum to 1, got sum {w.sum():.17g}")
        d = states[0].d
        if any(s.d != d for s in states):
            raise DimensionError("All mixed states must share the local dimension")
        rho = sum(float(wi) * s.rho for wi, s in zip(w, states))
        return cls(d, rho, check_psd=False)

    @property
    def dim(self) -> int:
        return self.d**3

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


StateLike = Union[TripartiteState, ComplexMatrix]


def _local_dim(n: int) -> int:
    d = int(round(n ** (1.0 / 3.0)))
    for cand in (d - 1, d, d + 1):
        if cand >= 1 and cand**3 == n:
            return cand
    raise DimensionError(f"Size {n} is not a cube d^3 of a local dimension")


def _state_matrix(s: StateLike) -> Tuple[ComplexMatrix, int]:
    if isinstance(s, TripartiteState):
        return s.rho, s.d
    a = as_matrix(s)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Expected a square matrix, got {a.shape}")
    return a, _local_dim(a.shape[0])


def partial_transpose(s: StateLike, subsystem: int) -> ComplexMatrix:
    """Transpose the bra/ket indices of one party (1, 2 or 3)."""
    rho, d = _state_matrix(s)
    if subsystem not in (1, 2, 3):
        raise ValidationError(f"Invalid subsystem index {subsystem!r}; expected 1, 2 or 3")
    axes = list(range(6))
    k = subsystem - 1
    axes[k], axes[k + 3] = axes[k + 3], axes[k]
    n = d**3
    return np.ascontiguousarray(rho.reshape((d,) * 6).transpose(axes)).reshape(n, n)


def partial_trace(m: object, dims: Sequence[int], keep: Sequence[int]) -> ComplexMatrix:
    """Trace out every party not listed in ``keep`` (1-based party labels)."""
    a = as_matrix(m)
    dims = tuple(int(x) for x in dims)
    n = int(np.prod(dims))
    if a.shape != (n, n):
        raise DimensionError(f"Matrix shape {a.shape} does not match party dims {dims}")
    kept = set(int(k) for k in keep)
    if not kept.issubset(range(1, len(dims) + 1)):
        raise ValidationError(f"Parties to keep {sorted(kept)} out of range for {len(dims)} parties")

    t = a.reshape(dims + dims)
    cur = list(dims)
    for party in sorted(set(range(1, len(dims) + 1)) - kept, reverse=True):
        i = party - 1
        t = np.trace(t, axis1=i, axis2=i + len(cur))
        cur.pop(i)
    k = int(np.prod(cur)) if cur else 1
    return t.reshape(k, k)


def permute_subsystems(s: StateLike, order: Sequence[int]) -> ComplexMatrix:
    """New party j is old party order[j-1]."""
    rho, d = _state_matrix(s)
    if sorted(order) != [1, 2, 3]:
        raise ValidationError(f"Order must be a permutation of (1, 2, 3), got {tuple(order)}")
    src = [o - 1 for o in order]
    n = d**3
    return np.ascontiguousarray(rho.reshape((d,) * 6).transpose(src + [k + 3 for k in src])).reshape(n, n)


def permutation_residual(s: StateLike) -> float:
    rho, _ = _state_matrix(s)
    return max(float(np.max(np.abs(rho - permute_subsystems(rho, p)))) for p in _TRANSPOSITIONS)


# ---------------------------------------------------------------------- #
# Spectral decompositions (cyclic Jacobi)                                #
# ---------------------------------------------------------------------- #


def _off_norm(a: ComplexMatrix) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotation(app: float, aqq: float, apq: complex) -> Tuple[float, float, complex]:
    mag = abs(apq)
    zeta = (aqq - app) / (2.0 * mag)
    t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, c * t, (apq / mag).conjugate()


def hermitian_eigh(m: object) -> Tuple[RealVector, ComplexMatrix]:
    """Eigenvalues (descending) and eigenvectors of a Hermitian matrix."""
    a0 = as_matrix(m)
    n = a0.shape[0]
    if a0.shape[1] != n:
        raise DimensionError(f"Expected a square matrix, got {a0.shape}")
    asym = float(np.max(np.abs(a0 - a0.conj().T), initial=0.0))
    if asym > HERMITIAN_INPUT_TOL:
        raise ValidationError(f"Matrix is not Hermitian: max |m - m^dagger| = {asym:.3e}")

    a0 = 0.5 * (a0 + a0.conj().T)
    a = a0.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = frobenius_norm(a)
    if n <= 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v

    threshold = OFF_DIAGONAL_TOL * scale
    skip = threshold / n
    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps == MAX_SWEEPS:
            raise ConvergenceError(
                "Jacobi eigensolver hit the sweep cap", residual=_off_norm(a) / scale, sweeps=sweeps
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= skip:
                    continue
                c, s, ph = _rotation(a[p, p].real, a[q, q].real, a[p, q])
                u = np.array([[c, s], [-s * ph, c * ph]], dtype=np.complex128)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]

    residual = frobenius_norm((v * w) @ v.conj().T - a0) / scale
    if residual > RECONSTRUCTION_TOL:
        raise ConvergenceError("Spectral reconstruction residual too large", residual=residual, sweeps=sweeps)
    return w, v


def hermitian_eigenvalues(m: object) -> RealVector:
    return hermitian_eigh(m)[0]


def singular_values(m: object) -> RealVector:
    """One-sided (Hestenes) Jacobi; returns min(rows, cols) values, descending."""
    a = as_matrix(m)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    work = np.array(a, dtype=np.complex128, copy=True)
    k = work.shape[1]
    if k == 0:
        return np.zeros(0)
    scale = frobenius_norm(work)
    if scale == 0.0:
        return np.zeros(k)

    floor = (np.finfo(np.float64).eps * scale) ** 2
    sweeps = 0
    while True:
        rotated = False
        worst = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                ap = work[:, p]
                aq = work[:, q]
                alpha = float(np.vdot(ap, ap).real)
                beta = float(np.vdot(aq, aq).real)
                if alpha <= floor or beta <= floor:
                    continue
                gamma = complex(np.vdot(ap, aq))
                rel = abs(gamma) / math.sqrt(alpha * beta)
                worst = max(worst, rel)
                if rel <= OFF_DIAGONAL_TOL:
                    continue
                c, s, ph = _rotation(alpha, beta, gamma)
                aq = aq * ph
                work[:, p], work[:, q] = c * ap - s * aq, s * ap + c * aq
                rotated = True
        sweeps += 1
        if not rotated:
            break
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError("One-sided Jacobi SVD hit the sweep cap", residual=worst, sweeps=sweeps)

    sigma = np.sqrt(np.sum(work.real**2 + work.imag**2, axis=0))
    return np.sort(sigma)[::-1]


def trace_norm(m: object, method: str = "auto") -> float:
    """Sum of singular values.

    ``method`` is "svd", "eig" (sum of |eigenvalues|, Hermitian input only) or
    "auto" (eig for Hermitian square input, svd otherwise).
    """
    a = as_matrix(m)
    if method == "auto":
        square = a.shape[0] == a.shape[1]
        method = "eig" if square and is_hermitian(a, HERMITIAN_TOL) else "svd"
    if method == "eig":
        return float(np.sum(np.abs(hermitian_eigenvalues(a))))
    if method == "svd":
        return float(np.sum(singular_values(a)))
    raise ValidationError(f"Unknown trace-norm method {method!r}")
