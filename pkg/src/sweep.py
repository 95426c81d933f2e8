from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, TextIO, Tuple

import numpy as np

from .criteria import REFERENCE_CROSSOVERS, evaluate
from .errors import NoCrossingError, ValidationError
from .matcore import TripartiteState
from .normalize import canon_criterion, norm_text
from .states import StateSpec, build_state

log = logging.getLogger("gme.sweep")

PARAMETERS: Tuple[str, ...] = ("visibility", "noise-weight")
BISECTION_WIDTH = 1e-8
CSV_HEADER = ("parameter", "value", "threshold", "value_minus_threshold")


def canon_parameter(raw: str | None) -> str:
    t = norm_text(raw)
    if t in {"visibility", "v", "p"}:
        return "visibility"
    if t in {"noise weight", "noise", "x"}:
        return "noise-weight"
    raise ValidationError(f"Unknown sweep parameter {raw!r}; expected one of {', '.join(PARAMETERS)}")


def to_visibility(parameter: str, x: float) -> float:
    return float(x) if parameter == "visibility" else 1.0 - float(x)


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    steps: int

    def values(self) -> List[float]:
        return [float(x) for x in np.linspace(self.lo, self.hi, self.steps)]


def parse_grid(text: str) -> Grid:
    """'lo:hi:steps' with steps the number of points (>= 2) and lo < hi."""
    parts = (text or "").split(":")
    if len(parts) != 3:
        raise ValidationError(f"Grid must look like lo:hi:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"Grid must look like lo:hi:steps with numeric parts, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValidationError(f"Degenerate grid {text!r}: need finite lo < hi")
    if steps < 2:
        raise ValidationError(f"Degenerate grid {text!r}: need at least 2 points")
    return Grid(lo, hi, steps)


def parse_bracket(text: str) -> Tuple[float, float]:
    parts = (text or "").replace(",", ":").split(":")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"Bracket must look like lo:hi, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValidationError(f"Degenerate bracket {text!r}: need finite lo < hi")
    return lo, hi


@dataclass(frozen=True)
class SweepPoint:
    parameter: float
    value: float
    threshold: float
    margin: float
    verdict: str


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    criterion: str
    points: Tuple[SweepPoint, ...]
    crossover: Optional[float] = None
    crossovers: Tuple[float, ...] = ()
    notes: Tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Crossover:
    parameter: str
    criterion: str
    mode: Optional[str]
    lo: float
    hi: float
    value: float
    notes: Tuple[str, ...] = ()


def _check_range(parameter: str, lo: float, hi: float) -> None:
    if lo < 0.0 or hi > 1.0:
        raise ValidationError(f"{parameter} range [{lo}, {hi}] must lie inside [0, 1]")


def evaluate_point(
    spec: StateSpec,
    criterion: Optional[str],
    mode: str,
    parameter: str,
    x: float,
    custom: Optional[TripartiteState] = None,
) -> SweepPoint:
    s = build_state(spec.with_visibility(to_visibility(parameter, x)), custom)
    rep = evaluate(s, criterion, mode)
    return SweepPoint(parameter=x, value=rep.value, threshold=rep.threshold, margin=rep.margin, verdict=rep.verdict)


def _point_task(args: Tuple[StateSpec, Optional[str], str, str, float, Optional[TripartiteState]]) -> SweepPoint:
    return evaluate_point(*args)


def bisect_crossover(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    width: float = BISECTION_WIDTH,
) -> float:
    """Parameter in [lo, hi] where fn changes sign, to within ``width``."""
    if not lo < hi:
        raise ValidationError(f"Bisection needs lo < hi, got [{lo}, {hi}]")
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoCrossingError(
            f"value - threshold does not change sign on [{lo:g}, {hi:g}] "
            f"(margins {f_lo:+.6g} and {f_hi:+.6g})",
            lo=lo,
            hi=hi,
            margin_lo=f_lo,
            margin_hi=f_hi,
        )

    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan(
    spec: StateSpec,
    criterion: Optional[str],
    grid: Grid,
    parameter: str = "visibility",
    mode: str = "theorem2",
    workers: int = 1,
    custom: Optional[TripartiteState] = None,
    heartbeat_every: int = 250,
) -> SweepResult:
    """Evaluate the criterion along the grid; rows come back in grid order."""
    parameter = canon_parameter(parameter)
    _check_range(parameter, grid.lo, grid.hi)
    xs = grid.values()
    tasks = [(spec, criterion, mode, parameter, x, custom) for x in xs]

    log.info(f"Scanning {spec.family} d={spec.d} over {parameter} {grid.lo:g}..{grid.hi:g} ({grid.steps} points)")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points: List[SweepPoint] = list(pool.map(_point_task, tasks))
    else:
        points = []
        for i, t in enumerate(tasks, start=1):
            points.append(_point_task(t))
            if i % heartbeat_every == 0:
                log.info(f"Evaluated {i}/{len(tasks)} points | value={points[-1].value:.6f}")

    name = evaluate_name(spec, criterion)

    def margin(x: float) -> float:
        return evaluate_point(spec, criterion, mode, parameter, x, custom).margin

    crossings: List[float] = []
    for a, b in zip(points, points[1:]):
        if (a.margin > 0) != (b.margin > 0):
            crossings.append(bisect_crossover(margin, a.parameter, b.parameter))
    if crossings:
        log.info(f"Found {len(crossings)} crossing(s): {', '.join(f'{c:.9f}' for c in crossings)}")

    return SweepResult(
        parameter=parameter,
        criterion=name,
        points=tuple(points),
        crossover=crossings[0] if crossings else None,
        crossovers=tuple(crossings),
        notes=tuple(reference_notes(spec, name, mode, parameter)),
    )


def evaluate_name(spec: StateSpec, criterion: Optional[str]) -> str:
    if criterion:
        return canon_criterion(criterion)
    return "pt-qubit" if spec.d == 2 else "ct-qudit"


def reference_notes(spec: StateSpec, criterion: str, mode: str, parameter: str) -> List[str]:
    """Reference crossover values for the benchmark families, converted to ``parameter``."""
    ref = REFERENCE_CROSSOVERS.get(criterion)
    if not ref or spec.family != "ghz" or spec.d != ref["d"]:
        return []
    notes: List[str] = []
    ref_param = str(ref["parameter"])
    key = "detected_below" if "detected_below" in ref else "detected_above"
    for label, x in dict(ref[key]).items():  # type: ignore[arg-type]
        x = float(x)
        shown = x if ref_param == parameter else 1.0 - x
        notes.append(f"reference crossover {label}: {parameter}={shown:.6g}")
    if criterion == "ct-qudit" and mode != "corollary":
        notes.append("reference ct-qudit crossover uses the corollary threshold")
    return notes


def find_crossover(
    spec: StateSpec,
    criterion: Optional[str],
    bracket: Tuple[float, float],
    parameter: str = "visibility",
    mode: str = "theorem2",
    custom: Optional[TripartiteState] = None,
) -> Crossover:
    parameter = canon_parameter(parameter)
    lo, hi = bracket
    _check_range(parameter, lo, hi)
    name = evaluate_name(spec, criterion)

    def margin(x: float) -> float:
        return evaluate_point(spec, criterion, mode, parameter, x, custom).margin

    notes = reference_notes(spec, name, mode, parameter)
    try:
        x = bisect_crossover(margin, lo, hi)
    except NoCrossingError as e:
        if notes:
            e.note = (
                "The implemented formulas give no crossing on this bracket; "
                + "; ".join(notes)
            )
            log.warning(e.note)
        raise

    log.info(f"Crossover for {name} at {parameter}={x:.9f}")
    return Crossover(
        parameter=parameter,
        criterion=name,
        mode=mode if name == "ct-qudit" else None,
        lo=lo,
        hi=hi,
        value=x,
        notes=tuple(notes),
    )


def write_csv(result: SweepResult, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in result.points:
        w.writerow([repr(p.parameter), repr(p.value), repr(p.threshold), repr(p.margin)])

