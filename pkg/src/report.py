from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from typing import Any, Iterable, List, Sequence, Tuple

from .audit import AuditRecord
from .criteria import CriterionReport
from .errors import ValidationError
from .sweep import Crossover, SweepResult, write_csv

FORMATS: Tuple[str, ...] = ("text", "csv", "machine")


def _num(x: Any) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _block(title: str, pairs: Sequence[Tuple[str, Any]], notes: Iterable[str] = ()) -> str:
    width = max(len(k) for k, _ in pairs)
    lines = [title, "-" * len(title)]
    lines += [f"{k.ljust(width)} : {_num(v)}" for k, v in pairs]
    notes = list(notes)
    if notes:
        lines.append("notes:")
        lines += [f"  - {n}" for n in notes]
    return "\n".join(lines) + "\n"


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _check(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValidationError(f"Unknown output format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return fmt


def render_report(rep: CriterionReport, fmt: str = "text") -> str:
    fmt = _check(fmt)
    if fmt == "machine":
        return _json(rep.to_dict())
    if fmt == "csv":
        header = ["criterion", "mode", "d"] + [f"norm_{bp}" for bp in rep.norms] + [
            "value",
            "threshold",
            "value_minus_threshold",
            "verdict",
        ]
        row = [rep.criterion, rep.mode or "", rep.d] + list(rep.norms.values()) + [
            rep.value,
            rep.threshold,
            rep.margin,
            rep.verdict,
        ]
        return _csv(header, [row])

    pairs: List[Tuple[str, Any]] = [("criterion", rep.criterion)]
    if rep.mode:
        pairs.append(("mode", rep.mode))
    pairs.append(("d", rep.d))
    for bp, v in rep.norms.items():
        pairs.append((f"norm {bp}", v))
    for bp, v in rep.bounds.items():
        pairs.append((f"bound {bp}", v))
    pairs += [("value", rep.value), ("threshold", rep.threshold), ("margin", rep.margin), ("verdict", rep.verdict)]
    return _block("GME criterion report", pairs, rep.notes)


def render_sweep(result: SweepResult, fmt: str = "text") -> str:
    fmt = _check(fmt)
    if fmt == "csv":
        buf = io.StringIO()
        write_csv(result, buf)
        return buf.getvalue()
    if fmt == "machine":
        return _json(
            {
                "parameter": result.parameter,
                "criterion": result.criterion,
                "points": [asdict(p) for p in result.points],
                "crossover": result.crossover,
                "crossovers": list(result.crossovers),
                "notes": list(result.notes),
            }
        )

    lines = [f"{result.parameter:>14}  {'value':>14}  {'threshold':>14}  {'margin':>14}  verdict"]
    for p in result.points:
        lines.append(f"{p.parameter:>14.6f}  {p.value:>14.9f}  {p.threshold:>14.9f}  {p.margin:>+14.9f}  {p.verdict}")
    summary = _block(
        f"Sweep of {result.criterion} over {result.parameter}",
        [
            ("points", len(result.points)),
            ("crossover", result.crossover),
            ("all crossings", ", ".join(f"{c:.9f}" for c in result.crossovers) or "-"),
        ],
        result.notes,
    )
    return summary + "\n" + "\n".join(lines) + "\n"


def render_crossover(c: Crossover, fmt: str = "text") -> str:
    fmt = _check(fmt)
    if fmt == "machine":
        return _json({**asdict(c), "notes": list(c.notes)})
    if fmt == "csv":
        return _csv(
            ["parameter", "criterion", "mode", "lo", "hi", "crossover"],
            [[c.parameter, c.criterion, c.mode, c.lo, c.hi, c.value]],
        )
    pairs: List[Tuple[str, Any]] = [
        ("criterion", c.criterion),
        ("mode", c.mode),
        ("parameter", c.parameter),
        ("bracket", f"[{c.lo:g}, {c.hi:g}]"),
        ("crossover", c.value),
    ]
    return _block("Crossover", pairs, c.notes)


AUDIT_CSV_HEADER = ("index", "label", "statistic", "running_max", "closed_form")


def audit_csv(record: AuditRecord) -> str:
    return _csv(
        AUDIT_CSV_HEADER,
        ([r.index, r.label, r.statistic, r.running_max, r.closed_form] for r in record.rows),
    )


def render_audit(record: AuditRecord, fmt: str = "text") -> str:
    fmt = _check(fmt)
    if fmt == "csv":
        return audit_csv(record)
    if fmt == "machine":
        return _json(record.to_dict())

    pairs: List[Tuple[str, Any]] = [
        ("bipartition", record.bipartition),
        ("d", record.d),
        ("samples", record.samples),
        ("seed", record.seed),
        ("states evaluated", len(record.rows)),
        ("statistic", record.statistic),
        ("max statistic", record.max_statistic),
        ("argmax", record.argmax),
        ("bound", record.bound),
        ("exceeds bound", "yes" if record.exceeds_bound else "no"),
    ]
    notes: List[str] = []
    if record.max_discrepancy is not None:
        pairs += [("max closed form", record.max_closed_form), ("max |direct - closed|", record.max_discrepancy)]
        if record.max_discrepancy > 1e-9:
            notes.append("the product-state closed form disagrees with the direct trace norm")
    return _block("Bound audit", pairs, notes)
