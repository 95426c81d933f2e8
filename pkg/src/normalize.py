from __future__ import annotations

import re
from typing import Dict, Set, Tuple

from .errors import ValidationError

_NON_LABEL = re.compile(r"[^a-z0-9|]+", re.I)

BIPARTITIONS: Tuple[str, ...] = ("1|23", "2|13", "3|12")

# singleton party -> (g, h), g < h
BIPARTITION_PARTS: Dict[str, Tuple[int, int, int]] = {
    "1|23": (1, 2, 3),
    "2|13": (2, 1, 3),
    "3|12": (3, 1, 2),
}

BIPARTITION_VARIANTS: Dict[str, Set[str]] = {
    "1|23": {"1 23", "1|32", "a|bc", "a bc", "n"},
    "2|13": {"2 13", "2|31", "b|ac", "b ac", "g"},
    "3|12": {"3 12", "3|21", "c|ab", "c ab", "s"},
}

FAMILIES: Tuple[str, ...] = (
    "ghz",
    "w",
    "product",
    "bisep-mixture",
    "random-pure",
    "white-noise",
    "custom",
)

FAMILY_VARIANTS: Dict[str, Set[str]] = {
    "bisep-mixture": {"bisep", "biseparable", "bisep mixture", "biseparable mixture"},
    "random-pure": {"random", "random pure", "haar"},
    "white-noise": {"white noise", "maximally mixed", "maximally-mixed", "mixed", "noise"},
    "ghz": {"greenberger horne zeilinger"},
    "w": {"w state"},
}

CRITERIA: Tuple[str, ...] = ("pt-qubit", "ct-qudit")
MODES: Tuple[str, ...] = ("theorem2", "corollary")


def norm_text(s: str | None) -> str:
    if not s:
        return ""
    s = s.strip().lower().replace("-", " ").replace("_", " ")
    s = _NON_LABEL.sub(" ", s)
    s = re.sub(r"\s*\|\s*", "|", s)
    return re.sub(r"\s+", " ", s).strip()


def canon_bipartition(raw: str | None, *, allow_mixed: bool = False) -> str:
    t = norm_text(raw)
    if allow_mixed and t == "mixed":
        return "mixed"
    for canon, variants in BIPARTITION_VARIANTS.items():
        if t == canon or t in variants:
            return canon
    allowed = ", ".join(BIPARTITIONS + (("mixed",) if allow_mixed else ()))
    raise ValidationError(f"Invalid bipartition label {raw!r}; expected one of {allowed}")


def canon_family(raw: str | None) -> str:
    t = norm_text(raw)
    for canon in FAMILIES:
        if t == norm_text(canon) or t in FAMILY_VARIANTS.get(canon, set()):
            return canon
    raise ValidationError(f"Unknown state family {raw!r}; expected one of {', '.join(FAMILIES)}")


def canon_criterion(raw: str | None) -> str:
    t = norm_text(raw)
    for canon in CRITERIA:
        if t == norm_text(canon):
            return canon
    if t in {"pt", "m", "qubit"}:
        return "pt-qubit"
    if t in {"ct", "m1", "qudit"}:
        return "ct-qudit"
    raise ValidationError(f"Unknown criterion {raw!r}; expected one of {', '.join(CRITERIA)}")


def canon_mode(raw: str | None) -> str:
    t = norm_text(raw).replace(" ", "")
    if t in MODES:
        return t
    if t in {"theorem", "max", "general"}:
        return "theorem2"
    if t in {"perm", "permutation", "symmetric"}:
        return "corollary"
    raise ValidationError(f"Unknown mode {raw!r}; expected one of {', '.join(MODES)}")
