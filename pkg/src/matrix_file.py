from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import DimensionError, ValidationError
from .matcore import MAX_LOCAL_DIM, TripartiteState

PathLike = Union[str, Path]


def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(a: np.ndarray) -> str:
    return "[\n" + ",\n".join("    [" + ", ".join(_fmt(x) for x in row) + "]" for row in a) + "\n  ]"


def _real_array(name: str, raw: Any, n: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != n or any(not isinstance(r, list) or len(r) != n for r in raw):
        raise DimensionError(f"Field {name!r} must be a {n}x{n} nested array")
    try:
        a = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValidationError(f"Field {name!r} holds non-numeric entries") from None
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"Field {name!r} holds non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class MatrixFile:
    """On-disk form of a tripartite density matrix.

    JSON object {"d", "parties", "re", "im"} where re and im are d^3 x d^3
    nested arrays of float reprs (at most 17 significant digits, sign of zero kept).
    """

    d: int
    parties: int
    re: np.ndarray
    im: np.ndarray

    @classmethod
    def from_state(cls, s: TripartiteState) -> "MatrixFile":
        return cls(d=s.d, parties=3, re=np.array(s.rho.real), im=np.array(s.rho.imag))

    def to_state(self) -> TripartiteState:
        return TripartiteState(self.d, self.re + 1j * self.im)

    @classmethod
    def from_dict(cls, data: Any) -> "MatrixFile":
        if not isinstance(data, dict):
            raise ValidationError("Matrix file must hold a JSON object")
        missing = [k for k in ("d", "parties", "re", "im") if k not in data]
        if missing:
            raise ValidationError(f"Matrix file is missing field(s): {', '.join(missing)}")

        d, parties = data["d"], data["parties"]
        if not isinstance(d, int) or isinstance(d, bool) or not 2 <= d <= MAX_LOCAL_DIM:
            raise DimensionError(f"Field 'd' must be an integer in [2, {MAX_LOCAL_DIM}], got {d!r}")
        if parties != 3:
            raise DimensionError(f"Field 'parties' must be 3, got {parties!r}")

        n = d**3
        return cls(d=d, parties=3, re=_real_array("re", data["re"], n), im=_real_array("im", data["im"], n))

    @classmethod
    def loads(cls, text: str) -> "MatrixFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Matrix file is not valid JSON: {e}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: PathLike) -> TripartiteState:
        """Read and fully validate a state (Hermitian, unit trace, PSD)."""
        return cls.loads(Path(path).read_text(encoding="utf-8")).to_state()

    def dumps(self) -> str:
        return (
            "{\n"
            f'  "d": {self.d},\n'
            f'  "parties": {self.parties},\n'
            f'  "re": {_rows(self.re)},\n'
            f'  "im": {_rows(self.im)}\n'
            "}\n"
        )

    @classmethod
    def dump(cls, s: TripartiteState, path: PathLike) -> None:
        Path(path).write_text(cls.from_state(s).dumps(), encoding="utf-8")
