"""
Command-line front end.

    sigma-stab analyze <input> [--tol T] [--theorem-tol T] [--format json|text] [--output PATH]
    sigma-stab sweep <input> --sigma-min A --sigma-max B [--steps K] [--output PATH]

Exit codes: 0 all applicable checks hold, 1 input or numerical error,
2 a theorem check failed (a finding about the matrix).
"""

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import List, Optional

import numpy as np
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from eig import spectral_abscissa
from errors import MatrixError, NotSigmaStable, SigmaStabError
from matcore import load_matrix
from report_schema import build_report_document, render_text_summary
from sigmacharpoly import coefficient_polynomials
from stability import AnalysisOptions, StabilityReport, analyze, sign_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDING = 2

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; exit 2 is reserved for theorem findings"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.WARNING)


@retry(
    stop=stop_after_attempt(5),
    wait=wait_exponential(multiplier=0.05, min=0.05, max=1),
    retry=retry_if_exception_type(PermissionError),
    reraise=True
)
def _replace(source: str, target: Path) -> None:
    # Windows refuses the rename while another process holds the target open
    os.replace(source, target)


def write_output(text: str, output: Optional[str]) -> None:
    """
    Write text to stdout, or atomically to a file (temp file in the same
    directory, then rename).
    """
    if output is None or output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    target = Path(output)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        _replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info("wrote %s", target)


def exit_code_for(report: StabilityReport) -> int:
    """1 for input/numerical failures, else 2 when a verdict fails, else 0"""
    if any(f.error_type != NotSigmaStable.__name__ for f in report.failures):
        return EXIT_ERROR
    if report.theorem_failed:
        return EXIT_FINDING
    return EXIT_OK


def _error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def cmd_analyze(args: argparse.Namespace) -> int:
    bracket = None
    if (args.sigma_lo is None) != (args.sigma_hi is None):
        return _error("--sigma-lo and --sigma-hi must be given together")
    if args.sigma_lo is not None:
        bracket = (args.sigma_lo, args.sigma_hi)

    try:
        opts = AnalysisOptions.from_env(tol=args.tol, theorem_tol=args.theorem_tol,
                                        max_workers=args.workers, bracket=bracket)
        m = load_matrix(args.input)
        logger.info("analyze %s (n=%d)", args.input, m.n)
        report = analyze(m, opts)
        doc = build_report_document(report, args.input, m)
    except FileNotFoundError as e:
        return _error(f"file not found: {e.filename or args.input}")
    except MatrixError as e:
        return _error(f"{args.input}: {e}")
    except SigmaStabError as e:
        return _error(f"{type(e).__name__}: {e}")

    if args.format == "text":
        text = render_text_summary(doc)
    else:
        text = doc.model_dump_json(indent=2) + "\n"
    try:
        write_output(text, args.output)
    except OSError as e:
        return _error(f"cannot write {args.output}: {e}")

    code = exit_code_for(report)
    logger.info("analyze finished with exit code %d", code)
    return code


def sweep_csv(m, sigma_min: float, sigma_max: float, steps: int, max_workers: int = 1) -> str:
    """
    Rows of sigma, abscissa, p_0..p_{n-1} and their signs on a uniform grid.

    Floats are written with repr, which round-trips exactly.
    """
    scp = coefficient_polynomials(m, max_workers)
    n = scp.n
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sigma", "abscissa"]
                    + [f"p_{i}" for i in range(n)]
                    + [f"sign_{i}" for i in range(n)])
    for s in np.linspace(sigma_min, sigma_max, steps):
        s = float(s)
        values = scp.evaluate(s)[:n]
        signs = sign_table(scp, s)[:n]
        writer.writerow([repr(s), repr(spectral_abscissa(m, s))]
                        + [repr(float(v)) for v in values]
                        + [int(sign) for sign in signs])
    return buf.getvalue()


def cmd_sweep(args: argparse.Namespace) -> int:
    if not args.sigma_min < args.sigma_max:
        return _error(f"--sigma-min ({args.sigma_min}) must be below --sigma-max ({args.sigma_max})")
    if args.steps < 2:
        return _error(f"--steps must be at least 2, got {args.steps}")
    try:
        m = load_matrix(args.input)
        text = sweep_csv(m, args.sigma_min, args.sigma_max, args.steps, args.workers)
    except FileNotFoundError as e:
        return _error(f"file not found: {e.filename or args.input}")
    except MatrixError as e:
        return _error(f"{args.input}: {e}")
    except SigmaStabError as e:
        return _error(f"{type(e).__name__}: {e}")
    try:
        write_output(text, args.output)
    except OSError as e:
        return _error(f"cannot write {args.output}: {e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="matrix file (.csv or .json)")
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
    common.add_argument("--workers", type=int, default=None, help="worker threads")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")

    parser = _Parser(prog="sigma-stab", description="Sigma-stability analysis of a real square matrix")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_analyze = sub.add_parser("analyze", parents=[common], help="full stability report")
    p_analyze.add_argument("--tol", type=float, default=None, help="bisection width (default 1e-10)")
    p_analyze.add_argument("--theorem-tol", type=float, default=None, help="verdict tolerance (default 1e-6)")
    p_analyze.add_argument("--format", choices=("json", "text"), default="json")
    p_analyze.add_argument("--sigma-lo", type=float, default=None, help="search bracket lower end")
    p_analyze.add_argument("--sigma-hi", type=float, default=None, help="search bracket upper end")
    p_analyze.set_defaults(func=cmd_analyze)

    p_sweep = sub.add_parser("sweep", parents=[common], help="coefficient signs and abscissa on a sigma grid")
    p_sweep.add_argument("--sigma-min", type=float, required=True)
    p_sweep.add_argument("--sigma-max", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, default=200)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    if getattr(args, "workers", None) is None and args.command == "sweep":
        args.workers = 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
