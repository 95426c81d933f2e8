from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .audit import AuditRecord, audit_bound
from .cache_db import AuditCache
from .config import Config, load_config
from .criteria import CriterionReport, evaluate
from .errors import ConvergenceError, DimensionError, GmeError, NoCrossingError, ValidationError
from .matcore import TripartiteState
from .matrix_file import MatrixFile
from .normalize import BIPARTITIONS, CRITERIA, FAMILIES, MODES, canon_bipartition
from .report import FORMATS, audit_csv, render_audit, render_crossover, render_report, render_sweep
from .states import StateSpec, build_state
from .sweep import PARAMETERS, Crossover, SweepResult, find_crossover, parse_bracket, parse_grid, scan, write_csv

log = logging.getLogger("gme")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_NO_CROSSING = 3
EXIT_NO_CONVERGENCE = 4

DEFAULT_D = 2


def _setup_logging(level: int) -> None:
    # stdout carries reports and CSV
    logging.basicConfig(
        level=level,
        format="%(asctime)s | %(levelname)s | %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _add_state_args(p: argparse.ArgumentParser, *, with_noise: bool = True) -> None:
    p.add_argument("--state", default="ghz", help=f"state family: {', '.join(FAMILIES)}")
    p.add_argument("--d", type=int, default=None, help="local dimension (default 2, or taken from --input)")
    p.add_argument("--seed", type=int, default=0, help="seed for random families")
    p.add_argument("--bipartition", default="1|23", help=f"cut for bisep-mixture: {', '.join(BIPARTITIONS)} or mixed")
    p.add_argument("--mixture-terms", type=int, default=3)
    p.add_argument("--real", action="store_true", help="draw real amplitudes for random families")
    p.add_argument("--input", default=None, help="matrix file to evaluate (family becomes custom)")
    if with_noise:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--noise-weight", type=float, default=None, help="white-noise weight x (visibility 1-x)")
        g.add_argument("--visibility", type=float, default=None, help="weight on the target state")


def _add_criterion_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", choices=CRITERIA, default=None, help="default: pt-qubit for d=2, ct-qudit else")
    p.add_argument("--mode", choices=MODES, default="theorem2")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", default=None, help="write the rendered output here instead of stdout")
    p.add_argument("--workers", type=int, default=None, help="process count (default GME_WORKERS)")
    p.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gme",
        description="Detect genuine tripartite entanglement with trace-norm criteria",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="evaluate a criterion on one state")
    _add_state_args(p)
    _add_criterion_args(p)
    _add_output_args(p)

    p = sub.add_parser("scan", help="evaluate a criterion along a noise grid")
    _add_state_args(p, with_noise=False)
    _add_criterion_args(p)
    p.add_argument("--grid", required=True, help="lo:hi:steps, steps = number of points")
    p.add_argument("--sweep", choices=PARAMETERS, default="visibility", help="convention of the grid")
    p.add_argument("--csv", default=None, help="also write the CSV rows to this path")
    _add_output_args(p)

    p = sub.add_parser("crossover", help="bisect where value - threshold changes sign")
    _add_state_args(p, with_noise=False)
    _add_criterion_args(p)
    p.add_argument("--bracket", default="0:1", help="lo:hi in the --sweep convention")
    p.add_argument("--sweep", choices=PARAMETERS, default="visibility")
    _add_output_args(p)

    p = sub.add_parser("audit", help="sample biseparable states against a single-cut bound")
    p.add_argument("--bipartition", default="1|23")
    p.add_argument("--d", type=int, default=DEFAULT_D)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--real", action="store_true", help="real amplitudes on both factors")
    p.add_argument("--fully-product", action="store_true", help="draw fully product states instead")
    p.add_argument("--no-probes", action="store_true", help="skip the fixed probe states")
    p.add_argument("--csv", default=None, help="write the running-maximum CSV to this path")
    c = p.add_mutually_exclusive_group()
    c.add_argument("--cache", default=None, help="sqlite file for audit records (default GME_CACHE_PATH)")
    c.add_argument("--no-cache", action="store_true")
    _add_output_args(p)

    p = sub.add_parser("gen", help="write a generated state to a matrix file")
    _add_state_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--verbose", action="store_true")

    return parser


def _visibility(args: argparse.Namespace) -> float:
    if getattr(args, "noise_weight", None) is not None:
        return 1.0 - args.noise_weight
    if getattr(args, "visibility", None) is not None:
        return args.visibility
    return 1.0


def _spec(args: argparse.Namespace) -> Tuple[StateSpec, Optional[TripartiteState]]:
    custom: Optional[TripartiteState] = None
    family, d = args.state, args.d
    if args.input:
        custom = MatrixFile.load(args.input)
        if d is not None and d != custom.d:
            raise DimensionError(f"--d {d} does not match the matrix file (d={custom.d})")
        family, d = "custom", custom.d
    spec = StateSpec(
        family=family,
        d=d if d is not None else DEFAULT_D,
        visibility=_visibility(args),
        seed=args.seed,
        bipartition=args.bipartition,
        mixture_terms=args.mixture_terms,
        real_amplitudes=args.real,
    )
    return spec, custom


def _workers(args: argparse.Namespace, cfg: Config) -> int:
    w = args.workers if args.workers is not None else cfg.workers
    if w < 1:
        raise ValidationError(f"--workers must be >= 1, got {w}")
    return w


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        log.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_evaluate(args: argparse.Namespace, cfg: Config) -> CriterionReport:
    spec, custom = _spec(args)
    rep = evaluate(build_state(spec, custom), args.criterion, args.mode)
    log.info(f"{rep.criterion} value={rep.value:.9f} threshold={rep.threshold:.9f} verdict={rep.verdict}")
    _emit(render_report(rep, args.format), args.out)
    return rep


def cmd_scan(args: argparse.Namespace, cfg: Config) -> SweepResult:
    spec, custom = _spec(args)
    result = scan(
        spec,
        args.criterion,
        parse_grid(args.grid),
        parameter=args.sweep,
        mode=args.mode,
        workers=_workers(args, cfg),
        custom=custom,
        heartbeat_every=cfg.heartbeat_every,
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            write_csv(result, f)
        log.info(f"Wrote {args.csv}")
    _emit(render_sweep(result, args.format), args.out)
    return result


def cmd_crossover(args: argparse.Namespace, cfg: Config) -> Crossover:
    spec, custom = _spec(args)
    c = find_crossover(spec, args.criterion, parse_bracket(args.bracket), args.sweep, args.mode, custom)
    _emit(render_crossover(c, args.format), args.out)
    return c


def audit_params(args: argparse.Namespace, cfg: Config) -> Dict[str, object]:
    return {
        "bipartition": canon_bipartition(args.bipartition),
        "d": args.d,
        "samples": args.samples,
        "seed": args.seed,
        "real_amplitudes": bool(args.real),
        "fully_product": bool(args.fully_product),
        "probes": not args.no_probes,
        "chunk_size": cfg.audit_chunk_size,
    }


def cmd_audit(args: argparse.Namespace, cfg: Config) -> AuditRecord:
    params = audit_params(args, cfg)
    cache_path = None if args.no_cache else (args.cache or cfg.cache_path)
    cache = AuditCache(cache_path, cfg.cache_ttl_days) if cache_path else None

    try:
        record = cache.get(params) if cache else None
        if record is None:
            record = audit_bound(
                args.bipartition,
                args.d,
                args.samples,
                args.seed,
                real_amplitudes=bool(args.real),
                fully_product=bool(args.fully_product),
                probes=not args.no_probes,
                chunk_size=cfg.audit_chunk_size,
                workers=_workers(args, cfg),
                heartbeat_every=cfg.heartbeat_every,
            )
            if cache:
                cache.put(params, record)
        else:
            log.info(f"Reusing cached audit from {cache_path}")
    finally:
        if cache:
            cache.close()

    if args.csv:
        Path(args.csv).write_text(audit_csv(record), encoding="utf-8")
        log.info(f"Wrote {args.csv}")
    _emit(render_audit(record, args.format), args.out)
    return record


def cmd_gen(args: argparse.Namespace, cfg: Config) -> TripartiteState:
    spec, custom = _spec(args)
    s = build_state(spec, custom)
    MatrixFile.dump(s, args.out)
    log.info(f"Wrote {spec.family} d={spec.d} visibility={spec.visibility:g} to {args.out}")
    return s


COMMANDS: Dict[str, Callable[[argparse.Namespace, Config], object]] = {
    "evaluate": cmd_evaluate,
    "scan": cmd_scan,
    "crossover": cmd_crossover,
    "audit": cmd_audit,
    "gen": cmd_gen,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        cfg = load_config()
    except GmeError as e:
        _setup_logging(logging.INFO)
        log.error(str(e))
        return EXIT_ERROR

    _setup_logging(logging.DEBUG if args.verbose else cfg.log_level)
    log.debug(f"Running {args.command} with {vars(args)}")

    try:
        COMMANDS[args.command](args, cfg)
    except NoCrossingError as e:
        log.error(str(e))
        if e.note:
            log.error(e.note)
        return EXIT_NO_CROSSING
    except ConvergenceError as e:
        log.error(str(e))
        return EXIT_NO_CONVERGENCE
    except ValidationError as e:
        log.error(str(e))
        return EXIT_INVALID
    except GmeError as e:
        log.error(str(e))
        return EXIT_ERROR
    except OSError as e:
        log.error(f"I/O error: {e}")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
