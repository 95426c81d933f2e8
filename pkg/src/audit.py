from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .bloch import decompose
from .criteria import (
    build_constructed,
    constructed_norm,
    pt_difference,
    pt_product_closed_form,
    pt_product_parameters,
    thresholds,
)
from .errors import DimensionError, ValidationError
from .matcore import MAX_LOCAL_DIM, TripartiteState, trace_norm
from .normalize import canon_bipartition
from .states import biseparable_ket, maximally_mixed, random_biseparable, random_product

log = logging.getLogger("gme.audit")

DEFAULT_CHUNK_SIZE = 250


@dataclass(frozen=True)
class AuditRow:
    index: int
    label: str
    statistic: float
    running_max: float
    closed_form: Optional[float] = None


@dataclass(frozen=True)
class AuditRecord:
    bipartition: str
    d: int
    samples: int
    seed: int
    statistic: str
    bound: float
    max_statistic: float
    argmax: str
    rows: Tuple[AuditRow, ...]
    max_closed_form: Optional[float] = None
    max_discrepancy: Optional[float] = None
    real_amplitudes: bool = False
    fully_product: bool = False
    probes: bool = True

    @property
    def exceeds_bound(self) -> bool:
        return self.max_statistic > self.bound

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["rows"] = [asdict(r) for r in self.rows]
        out["exceeds_bound"] = self.exceeds_bound
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AuditRecord":
        fields = dict(data)
        fields.pop("exceeds_bound", None)
        fields["rows"] = tuple(AuditRow(**r) for r in fields.get("rows") or [])
        return cls(**fields)


def statistic_name(d: int) -> str:
    return "pt-difference-trace-norm" if d == 2 else "constructed-matrix-trace-norm"


def audit_statistic(s: TripartiteState, bipartition: str) -> float:
    """d=2: ||rho - rho^{T_g}||_tr. d>=3: trace norm of the constructed matrix for the cut."""
    if s.d == 2:
        return trace_norm(pt_difference(s, bipartition), method="eig")
    return constructed_norm(build_constructed(decompose(s)), bipartition)


def _closed_form(s: TripartiteState, bipartition: str) -> float:
    t3, r = pt_product_parameters(decompose(s), bipartition)
    return pt_product_closed_form(t3, r)


def _bound(bipartition: str, d: int) -> float:
    if d == 2:
        return math.sqrt(3.0)
    return thresholds(d).bounds()[bipartition]


def _probes(bipartition: str, d: int) -> List[Tuple[str, TripartiteState]]:
    if d == 2:
        zero = np.array([1.0, 0.0], dtype=np.complex128)
        phi_plus = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
        return [("probe:bell-pair", TripartiteState.from_ket(biseparable_ket(zero, phi_plus, bipartition), 2))]
    return [("probe:maximally-mixed", maximally_mixed(d))]


def _chunk_bounds(samples: int, chunk_size: int) -> List[Tuple[int, int, int]]:
    return [(k, start, min(start + chunk_size, samples)) for k, start in enumerate(range(0, samples, chunk_size))]


def _run_chunk(task: Tuple[str, int, int, int, int, int, bool, bool]) -> List[Tuple[int, float, Optional[float]]]:
    """Evaluate sample indices [start, stop) with the generator owned by chunk k."""
    bipartition, d, seed, k, start, stop, real, fully_product = task
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
    out: List[Tuple[int, float, Optional[float]]] = []
    for i in range(start, stop):
        if fully_product:
            s = random_product(d, rng, real=real)
        else:
            s = random_biseparable(bipartition, d, rng, 1, real=real)
        closed = _closed_form(s, bipartition) if d == 2 else None
        out.append((i, audit_statistic(s, bipartition), closed))
    return out


def audit_bound(
    bipartition: str,
    d: int,
    samples: int,
    seed: int,
    *,
    real_amplitudes: bool = False,
    fully_product: bool = False,
    probes: bool = True,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    heartbeat_every: int = 250,
) -> AuditRecord:
    """Sample biseparable pure states of one cut and track the largest statistic.

    The record only depends on the arguments that change the draws, never on
    ``workers`` or ``chunk_size`` ordering of completion.
    """
    bp = canon_bipartition(bipartition)
    if not 2 <= d <= MAX_LOCAL_DIM:
        raise DimensionError(f"Local dimension must be in [2, {MAX_LOCAL_DIM}], got {d}")
    if samples < 0:
        raise ValidationError(f"samples must be >= 0, got {samples}")
    if samples == 0 and not probes:
        raise ValidationError("Nothing to audit: samples is 0 and probes are disabled")
    if seed < 0:
        raise ValidationError(f"seed must be a non-negative integer, got {seed}")
    if chunk_size < 1 or workers < 1 or heartbeat_every < 1:
        raise ValidationError(
            f"chunk_size, workers and heartbeat_every must be >= 1, got {chunk_size}, {workers} and {heartbeat_every}"
        )

    bound = _bound(bp, d)
    log.info(
        f"Audit {statistic_name(d)} | bipartition={bp} d={d} samples={samples} seed={seed} "
        f"real={real_amplitudes} fully_product={fully_product} bound={bound:.6f}"
    )

    rows: List[AuditRow] = []
    running = -math.inf
    argmax = ""
    probe_states = _probes(bp, d) if probes else []
    total = len(probe_states) + samples

    def add(label: str, stat: float, closed: Optional[float]) -> None:
        nonlocal running, argmax
        if stat > running:
            running, argmax = stat, label
        rows.append(AuditRow(index=len(rows), label=label, statistic=stat, running_max=running, closed_form=closed))
        if len(rows) % heartbeat_every == 0:
            log.info(f"Audited {len(rows)}/{total} states | running_max={running:.6f} at {argmax}")

    for label, s in probe_states:
        add(label, audit_statistic(s, bp), _closed_form(s, bp) if d == 2 else None)

    tasks = [
        (bp, d, seed, k, start, stop, real_amplitudes, fully_product)
        for k, start, stop in _chunk_bounds(samples, chunk_size)
    ]
    # chunks are folded in index order as they arrive
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_run_chunk, tasks):
                for i, stat, closed in chunk:
                    add(f"sample-{i}", stat, closed)
    else:
        for task in tasks:
            for i, stat, closed in _run_chunk(task):
                add(f"sample-{i}", stat, closed)

    max_closed: Optional[float] = None
    max_disc: Optional[float] = None
    if d == 2:
        max_closed = max(r.closed_form for r in rows if r.closed_form is not None)
        max_disc = max(abs(r.statistic - r.closed_form) for r in rows if r.closed_form is not None)

    record = AuditRecord(
        bipartition=bp,
        d=d,
        samples=samples,
        seed=seed,
        statistic=statistic_name(d),
        bound=bound,
        max_statistic=running,
        argmax=argmax,
        rows=tuple(rows),
        max_closed_form=max_closed,
        max_discrepancy=max_disc,
        real_amplitudes=real_amplitudes,
        fully_product=fully_product,
        probes=probes,
    )
    if record.exceeds_bound:
        log.warning(f"Max statistic {running:.6f} exceeds the bound {bound:.6f} (argmax {argmax})")
    log.info(f"Audit done | max={running:.6f} bound={bound:.6f} states={len(rows)}")
    return record
