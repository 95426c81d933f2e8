from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Union

import numpy as np

from .errors import DimensionError, ValidationError
from .matcore import MAX_LOCAL_DIM, TripartiteState
from .normalize import BIPARTITION_PARTS, BIPARTITIONS, canon_bipartition, canon_family

Seed = Union[int, np.random.Generator, np.random.SeedSequence, None]


@dataclass(frozen=True)
class StateSpec:
    family: str
    d: int
    visibility: float = 1.0
    seed: int = 0
    bipartition: str = "1|23"
    mixture_terms: int = 3
    real_amplitudes: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", canon_family(self.family))
        object.__setattr__(self, "bipartition", canon_bipartition(self.bipartition, allow_mixed=True))
        if not 2 <= int(self.d) <= MAX_LOCAL_DIM:
            raise DimensionError(f"Local dimension must be in [2, {MAX_LOCAL_DIM}], got {self.d}")
        _check_visibility(self.visibility)
        if self.mixture_terms < 1:
            raise ValidationError(f"mixture_terms must be >= 1, got {self.mixture_terms}")

    def with_visibility(self, visibility: float) -> "StateSpec":
        return replace(self, visibility=visibility)


def _check_visibility(v: float) -> None:
    if not (math.isfinite(v) and 0.0 <= v <= 1.0):
        raise ValidationError(f"Visibility must lie in [0, 1], got {v}")


def _rng(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def maximally_mixed(d: int) -> TripartiteState:
    n = d**3
    return TripartiteState(d, np.eye(n, dtype=np.complex128) / n, check_psd=False)


def ghz(d: int) -> TripartiteState:
    """(1/sqrt d) sum_i |iii> as a density matrix."""
    if d < 2:
        raise DimensionError(f"GHZ state needs d >= 2, got {d}")
    ket = np.zeros(d**3, dtype=np.complex128)
    ket[[i * (d * d + d + 1) for i in range(d)]] = 1.0 / math.sqrt(d)
    return TripartiteState.from_ket(ket, d)


def w_state(d: int) -> TripartiteState:
    """(|100> + |010> + |001>)/sqrt 3 embedded in d-level parties."""
    if d < 2:
        raise DimensionError(f"W state needs d >= 2, got {d}")
    ket = np.zeros(d**3, dtype=np.complex128)
    ket[[d * d, d, 1]] = 1.0 / math.sqrt(3.0)
    return TripartiteState.from_ket(ket, d)


def white_noise_mix(pure: TripartiteState, visibility: float) -> TripartiteState:
    """visibility * rho + (1 - visibility) * I / d^3."""
    _check_visibility(visibility)
    if visibility == 1.0:
        return pure
    n = pure.dim
    rho = visibility * pure.rho + (1.0 - visibility) * np.eye(n, dtype=np.complex128) / n
    return TripartiteState(pure.d, rho, check_psd=False)


def random_pure(d: int, parties: int, seed: Seed = None, *, real: bool = False) -> np.ndarray:
    """Normalized ket on ``parties`` d-level systems with Gaussian amplitudes (Haar)."""
    rng = _rng(seed)
    n = d**parties
    v = rng.standard_normal(n).astype(np.complex128)
    if not real:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _assemble(single: np.ndarray, pair: np.ndarray, d: int, bipartition: str) -> np.ndarray:
    f, g, h = BIPARTITION_PARTS[bipartition]
    t = np.multiply.outer(single, pair.reshape(d, d))  # axes ordered (f, g, h)
    order = [f, g, h]
    return t.transpose([order.index(p) for p in (1, 2, 3)]).reshape(-1)


def biseparable_ket(single: np.ndarray, pair: np.ndarray, bipartition: str) -> np.ndarray:
    """|single>_f (x) |pair>_gh with parties reordered to 1, 2, 3."""
    d = single.shape[0]
    if pair.shape != (d * d,):
        raise DimensionError(f"Pair ket must have {d * d} entries, got {pair.shape}")
    return _assemble(single, pair, d, canon_bipartition(bipartition))


def random_biseparable(
    bipartition: str,
    d: int,
    seed: Seed = None,
    mixture_terms: int = 1,
    *,
    real: bool = False,
) -> TripartiteState:
    """Dirichlet-weighted mixture of random pure products |phi_f> (x) |phi_gh>.

    ``bipartition`` may be "mixed" to pick the cut of every term at random.
    """
    label = canon_bipartition(bipartition, allow_mixed=True)
    if mixture_terms < 1:
        raise ValidationError(f"mixture_terms must be >= 1, got {mixture_terms}")
    rng = _rng(seed)

    weights = np.ones(1) if mixture_terms == 1 else rng.dirichlet(np.ones(mixture_terms))
    terms: List[TripartiteState] = []
    for _ in range(mixture_terms):
        cut = BIPARTITIONS[int(rng.integers(3))] if label == "mixed" else label
        single = random_pure(d, 1, rng, real=real)
        pair = random_pure(d, 2, rng, real=real)
        terms.append(TripartiteState.from_ket(_assemble(single, pair, d, cut), d))
    if mixture_terms == 1:
        return terms[0]
    weights = weights / weights.sum()
    return TripartiteState.mixture(weights, terms)


def random_product(d: int, seed: Seed = None, *, real: bool = False) -> TripartiteState:
    rng = _rng(seed)
    kets = [random_pure(d, 1, rng, real=real) for _ in range(3)]
    return TripartiteState.from_ket(np.kron(np.kron(kets[0], kets[1]), kets[2]), d)


def random_state(d: int, seed: Seed = None, rank: Optional[int] = None) -> TripartiteState:
    """Random mixed state G G^dagger / tr(G G^dagger) with a d^3 x rank Ginibre G."""
    rng = _rng(seed)
    n = d**3
    k = n if rank is None else int(rank)
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return TripartiteState(d, rho / np.trace(rho).real, check_psd=False)


def build_state(spec: StateSpec, custom: Optional[TripartiteState] = None) -> TripartiteState:
    if spec.family == "ghz":
        target = ghz(spec.d)
    elif spec.family == "w":
        target = w_state(spec.d)
    elif spec.family == "product":
        target = random_product(spec.d, spec.seed, real=spec.real_amplitudes)
    elif spec.family == "bisep-mixture":
        target = random_biseparable(
            spec.bipartition, spec.d, spec.seed, spec.mixture_terms, real=spec.real_amplitudes
        )
    elif spec.family == "random-pure":
        target = TripartiteState.from_ket(random_pure(spec.d, 3, spec.seed, real=spec.real_amplitudes), spec.d)
    elif spec.family == "white-noise":
        target = maximally_mixed(spec.d)
    else:
        if custom is None:
            raise ValidationError("Family 'custom' needs a state loaded from a matrix file")
        if custom.d != spec.d:
            raise DimensionError(f"Custom state has d={custom.d} but the spec asks for d={spec.d}")
        target = custom
    return white_noise_mix(target, spec.visibility)
