from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .bloch import CorrelationTensors, decompose
from .errors import DimensionError, ValidationError
from .matcore import PERMUTATION_TOL, TripartiteState, partial_transpose, permutation_residual, trace_norm
from .normalize import BIPARTITION_PARTS, BIPARTITIONS, canon_bipartition, canon_criterion, canon_mode
from .su_basis import antisym_slice

GME_DETECTED = "GME-detected"
INCONCLUSIVE = "inconclusive"

# Party transposed for each qubit bipartition f|gh: g, the smaller index of the pair.
PT_SUBSYSTEM: Dict[str, int] = {"1|23": 2, "2|13": 1, "3|12": 1}

SQRT3 = math.sqrt(3.0)

# Reference crossover points, for annotating curves only. The comparison
# criteria behind them are not implemented here.
REFERENCE_CROSSOVERS: Dict[str, Dict[str, object]] = {
    "pt-qubit": {
        "d": 2,
        "family": "ghz",
        "parameter": "noise-weight",
        "detected_below": {
            "trace-norm-pt": 0.134,
            "concurrence-lower-bound": 0.08349,
        },
    },
    "ct-qudit": {
        "d": 3,
        "family": "ghz",
        "parameter": "visibility",
        "detected_above": {
            "constructed-matrix-corollary": 0.708,
            "multipartite-concurrence-bound": 0.83485,
            "correlation-tensor-norm": 0.89443,
            "chsh-overlap": 0.731621,
        },
    },
}


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    mode: Optional[str]
    d: int
    norms: Mapping[str, float]
    bounds: Mapping[str, float]
    value: float
    threshold: float
    verdict: str
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def margin(self) -> float:
        return self.value - self.threshold

    @property
    def detected(self) -> bool:
        return self.verdict == GME_DETECTED

    def to_dict(self) -> Dict[str, object]:
        return {
            "criterion": self.criterion,
            "mode": self.mode,
            "d": self.d,
            "norms": dict(self.norms),
            "bounds": dict(self.bounds),
            "value": self.value,
            "threshold": self.threshold,
            "margin": self.margin,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def _make_report(
    criterion: str,
    mode: Optional[str],
    d: int,
    norms: Dict[str, float],
    bounds: Dict[str, float],
    threshold: float,
) -> CriterionReport:
    value = sum(norms[bp] for bp in BIPARTITIONS) / 3.0
    # strict: a tie is inconclusive
    verdict = GME_DETECTED if value > threshold else INCONCLUSIVE

    notes: List[str] = []
    for bp in BIPARTITIONS:
        if norms[bp] > bounds[bp]:
            notes.append(f"{bp} norm {norms[bp]:.6f} is above its single-cut bound {bounds[bp]:.6f}")

    return CriterionReport(
        criterion=criterion,
        mode=mode,
        d=d,
        norms=MappingProxyType({bp: norms[bp] for bp in BIPARTITIONS}),
        bounds=MappingProxyType({bp: bounds[bp] for bp in BIPARTITIONS}),
        value=value,
        threshold=threshold,
        verdict=verdict,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------- #
# Partial-transpose criterion (qubits)                                   #
# ---------------------------------------------------------------------- #


def pt_difference(s: TripartiteState, bipartition: str) -> np.ndarray:
    """rho - rho^{T_g} for the cut f|gh."""
    g = PT_SUBSYSTEM[canon_bipartition(bipartition)]
    return s.rho - partial_transpose(s, g)


def m_pt(s: TripartiteState) -> CriterionReport:
    if s.d != 2:
        raise DimensionError(f"The partial-transpose criterion is stated for qubits (d=2), got d={s.d}")

    by_subsystem: Dict[int, float] = {}
    norms: Dict[str, float] = {}
    for bp in BIPARTITIONS:
        g = PT_SUBSYSTEM[bp]
        if g not in by_subsystem:
            by_subsystem[g] = trace_norm(s.rho - partial_transpose(s, g), method="eig")
        norms[bp] = by_subsystem[g]

    bounds = {bp: SQRT3 for bp in BIPARTITIONS}
    return _make_report("pt-qubit", None, s.d, norms, bounds, SQRT3)


def pt_product_closed_form(t3: float, r: float) -> float:
    """(1/2)[t3 + r + |t3 - r|], the closed form for product states."""
    if not (math.isfinite(t3) and math.isfinite(r)) or r < 0:
        raise ValidationError(f"Closed form needs finite t3 and r >= 0, got t3={t3}, r={r}")
    return 0.5 * (t3 + r + abs(t3 - r))


def pt_product_direct(t3: float, r: float) -> float:
    """|t3 + r| + |t3 - r|, the trace norm an explicit product state yields."""
    return abs(t3 + r) + abs(t3 - r)


def pt_product_parameters(t: CorrelationTensors, bipartition: str) -> Tuple[float, float]:
    """(t3, r) for the cut f|gh: t^g along the antisymmetric generator and the
    norm of the matching row of T^(gh)."""
    if t.d != 2:
        raise DimensionError(f"Closed-form parameters are defined for qubits, got d={t.d}")
    _, g, h = BIPARTITION_PARTS[canon_bipartition(bipartition)]
    anti = antisym_slice(2).start
    t3 = float(t.one_body(g)[anti])
    r = float(np.linalg.norm(t.two_body(g, h)[anti, :]))
    return t3, r


# ---------------------------------------------------------------------- #
# Constructed-matrix criterion (qudits)                                  #
# ---------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class ConstructedMatrices:
    d: int
    N: np.ndarray
    G: np.ndarray
    S: np.ndarray

    def matrix(self, bipartition: str) -> np.ndarray:
        return {"1|23": self.N, "2|13": self.G, "3|12": self.S}[canon_bipartition(bipartition)]


def build_constructed(t: CorrelationTensors) -> ConstructedMatrices:
    """Block matrices N_{1|23}, G_{2|13}, S_{3|12} from the correlation tensors.

    Column pairs (i2, i3), (i1~, i3), (i1~, i2) are flattened first index major.
    """
    d = t.d
    n = d * d - 1
    anti = antisym_slice(d)
    m = anti.stop - anti.start

    t1a = t.T1[anti]                # T^(1~)
    t12a = t.T12[anti, :]           # (i1~, i2)
    t13a = t.T13[anti, :]           # (i1~, i3)
    t123a = t.T123[anti, :, :]      # (i1~, i2, i3)

    N = np.zeros((1 + m, 1 + 2 * n + n * n))
    N[0, 0] = 1.0
    N[0, 1 : 1 + n] = 0.5 * t.T2
    N[0, 1 + n : 1 + 2 * n] = 0.5 * t.T3
    N[0, 1 + 2 * n :] = 0.5 * t.T23.reshape(-1)
    N[1:, 0] = t1a
    N[1:, 1 : 1 + n] = 0.5 * t12a
    N[1:, 1 + n : 1 + 2 * n] = 0.5 * t13a
    N[1:, 1 + 2 * n :] = 0.5 * t123a.reshape(m, n * n)

    G = np.zeros((1 + n, 1 + m + m * n))
    G[0, 0] = 1.0
    G[0, 1 : 1 + m] = 0.5 * t1a
    G[0, 1 + m :] = 0.5 * t13a.reshape(-1)
    G[1:, 0] = t.T2
    G[1:, 1 : 1 + m] = 0.5 * t12a.T
    G[1:, 1 + m :] = 0.5 * t123a.transpose(1, 0, 2).reshape(n, m * n)

    S = np.zeros((1 + n, 1 + m + m * n))
    S[0, 0] = 1.0
    S[0, 1 : 1 + m] = 0.5 * t1a
    S[0, 1 + m :] = 0.5 * t12a.reshape(-1)
    S[1:, 0] = t.T3
    S[1:, 1 : 1 + m] = 0.5 * t13a.T
    S[1:, 1 + m :] = 0.5 * t123a.transpose(2, 0, 1).reshape(n, m * n)

    for arr in (N, G, S):
        arr.setflags(write=False)
    return ConstructedMatrices(d=d, N=N, G=G, S=S)


def constructed_norm(cm: ConstructedMatrices, bipartition: str) -> float:
    return trace_norm(cm.matrix(bipartition), method="svd")


def factorized_norm(t: CorrelationTensors, bipartition: str) -> float:
    """Product of the column and row vector norms of the rank-one form.

    Equals the constructed-matrix trace norm exactly for pure products across
    the same cut.
    """
    anti = antisym_slice(t.d)
    sq = lambda a: float(np.sum(np.asarray(a) ** 2))  # noqa: E731
    t1a = sq(t.T1[anti])
    bp = canon_bipartition(bipartition)
    if bp == "1|23":
        return math.sqrt(1 + t1a) * math.sqrt(1 + 0.25 * (sq(t.T2) + sq(t.T3) + sq(t.T23)))
    if bp == "2|13":
        return math.sqrt(1 + sq(t.T2)) * math.sqrt(1 + 0.25 * (t1a + sq(t.T13[anti, :])))
    return math.sqrt(1 + sq(t.T3)) * math.sqrt(1 + 0.25 * (t1a + sq(t.T12[anti, :])))


@dataclass(frozen=True)
class Thresholds:
    d: int
    bound_a: float
    bound_bc: float
    theorem2: float
    corollary: float

    def bounds(self) -> Dict[str, float]:
        return {"1|23": self.bound_a, "2|13": self.bound_bc, "3|12": self.bound_bc}


def thresholds(d: int) -> Thresholds:
    if d < 3:
        raise DimensionError(f"Constructed-matrix thresholds are defined for d >= 3, got d={d}")
    bound_a = math.sqrt((3 * d**3 + 4 * d**2 - 7 * d + 2) / (2 * d))
    bound_bc = math.sqrt((15 * d**3 - 13 * d**2 - 4 * d + 4) / (2 * d**3))
    return Thresholds(
        d=d,
        bound_a=bound_a,
        bound_bc=bound_bc,
        theorem2=max(bound_a, bound_bc),
        corollary=(bound_a + 2 * bound_bc) / 3.0,
    )


def m1_ct(s: TripartiteState, mode: str = "theorem2") -> CriterionReport:
    if s.d < 3:
        raise DimensionError(f"The constructed-matrix criterion needs d >= 3, got d={s.d}")
    mode = canon_mode(mode)
    if mode == "corollary":
        resid = permutation_residual(s)
        if resid > PERMUTATION_TOL:
            raise ValidationError(
                f"Corollary mode needs a permutation-invariant state; subsystem-swap residual "
                f"{resid:.3e} > {PERMUTATION_TOL:g}"
            )

    cm = build_constructed(decompose(s))
    norms = {bp: constructed_norm(cm, bp) for bp in BIPARTITIONS}
    th = thresholds(s.d)
    threshold = th.theorem2 if mode == "theorem2" else th.corollary
    return _make_report("ct-qudit", mode, s.d, norms, th.bounds(), threshold)


def evaluate(s: TripartiteState, criterion: str | None = None, mode: str = "theorem2") -> CriterionReport:
    """Run the criterion by name; the default picks pt-qubit for d=2, ct-qudit otherwise."""
    name = canon_criterion(criterion) if criterion else ("pt-qubit" if s.d == 2 else "ct-qudit")
    if name == "pt-qubit":
        return m_pt(s)
    return m1_ct(s, mode)


def qutrit_ghz_closed_form(x: float) -> float:
    """Closed-form M1 for the three-qutrit GHZ state at visibility x."""
    return (math.sqrt(2.0 / 9.0 * x * x + 1.0) + math.sqrt(2.0) * x + 4.0 * x + 2.0) / 3.0


def __getattr__(name: str):
    # audit_bound and its record types live in .audit, which imports this module
    if name in ("audit_bound", "AuditRecord", "AuditRow"):
        from . import audit

        return getattr(audit, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
