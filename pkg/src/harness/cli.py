#!/usr/bin/env python3
"""
Command-line harness for the equicorrelated FWER toolkit.

Subcommands:
    fwer          FWER of the proposed (or Bonferroni) cutoff by one engine
    table         Reproduce one of the published Tables 1-8
    power         Disjunctive power under an alternative
    kfwer         k-FWER of the proposed cutoff
    estimate-rho  Paired-difference estimate of rho from a data file
    reject        Apply a test procedure to a data file
    block         FWER of the block procedure

Every command writes CSV with a header row to stdout, or to --out FILE with a
sibling FILE.manifest. Exit status: 0 success, 1 unexpected failure,
2 usage error, 3 numeric domain error.

Usage:
    python -m src.harness.cli fwer --n 1e5 --alpha 0.05 --rho 0.5 --method quadrature
"""

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv

# Add src to path for imports
sys.path.append(str(Path(__file__).parent.parent.parent))
from src.core.cutoffs import CutoffKind, common_cutoff, proposed_cutoff
from src.core.errors import ArgumentError, DomainError, require_int_at_least
from src.core.estimation import rho_hat_star
from src.core.model import (
    AlternativeConfig,
    BlockStructure,
    CorrelationKnowledge,
    ProcedureConfig,
    parse_count,
    parse_key_values,
    parse_mean_segments,
)
from src.core.procedures import ProcedureKind, apply_procedure, cutoff_vector
from src.engines.analytic import exact_anypwr, exact_fwer_block, exact_fwer_equicorr, exact_kfwer_equicorr
from src.engines.montecarlo import (
    DEFAULT_FAST_REPS,
    DEFAULT_FULL_REPS,
    Metric,
    Scheme,
    SimulationPlan,
    simulate_block_fwer,
    simulate_full,
    simulate_fwer_fast,
    simulate_kfwer_fast,
    simulate_power,
)
from src.harness.run_manifest import RunManifest
from src.harness.tables import cell_seed, get_table
from src.utils.logging_config import setup_logging_from_env
from src.utils.signal_handler import GracefulShutdownHandler, OutputStreamManager

load_dotenv()

logger = logging.getLogger("src.harness.cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

METHODS = ("quadrature", "mc-fast", "mc-full")
CUTOFFS = (CutoffKind.PROPOSED.value, CutoffKind.BONFERRONI.value)

FWER_COLUMNS = ("n", "alpha", "rho", "method", "estimate", "se", "reps", "seed", "procedure")
TABLE_COLUMNS = ("table", "n", "alpha", "rho", "method", "estimate", "se", "reps", "seed", "quadrature", "published")
POWER_COLUMNS = ("n", "alpha", "rho", "n1", "procedure", "method", "estimate", "se", "reps", "seed")
KFWER_COLUMNS = ("n", "k", "alpha", "rho", "method", "estimate", "se", "reps", "seed")
ESTIMATE_COLUMNS = ("n", "pairs", "rho_hat_star", "raw_mean")
REJECT_COLUMNS = ("index", "statistic", "cutoff", "rejected")
BLOCK_COLUMNS = ("m", "n", "alpha", "cross_rho", "method", "estimate", "se", "reps", "seed")

# config key -> (attribute, parser)
CONFIG_KEYS = {
    "n": ("n", str),
    "alpha": ("alpha", float),
    "rho": ("rho", str),
    "data_rho": ("data_rho", float),
    "k": ("k", str),
    "blocks": ("blocks", str),
    "false_null_means": ("false_null_means", str),
}


def format_value(value: Any) -> str:
    """CSV cell text: integers exact, floats with 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.6g}"


class ResultWriter:
    """CSV writer with '\\n' line endings that counts data rows."""

    def __init__(self, stream):
        self.stream = stream
        self._writer = csv.writer(stream, lineterminator="\n")
        self.rows = 0

    def header(self, columns: Sequence[str]) -> None:
        self._writer.writerow(columns)

    def row(self, values: Sequence[Any]) -> None:
        self._writer.writerow([format_value(value) for value in values])
        self.rows += 1

    def flush(self) -> None:
        self.stream.flush()


def load_statistics(path: str) -> np.ndarray:
    """Read newline-separated decimals (UTF-8, no header); blank lines are skipped."""
    values: List[float] = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, 1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise ArgumentError(f"{path}:{line_number}: not a number: {text!r}", "data")
    except OSError as e:
        raise ArgumentError(f"cannot read data file {path}: {e}", "data")
    return np.asarray(values, dtype=float)


def _apply_config(args: argparse.Namespace) -> None:
    """Fill flags left unset from the --config file."""
    if not getattr(args, "config", None):
        return
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        raise ArgumentError(f"cannot read config file {args.config}: {e}", "config")
    for key, value in parse_key_values(text).items():
        if key not in CONFIG_KEYS:
            raise ArgumentError(f"unknown config key {key!r}", "config", key)
        attribute, parser = CONFIG_KEYS[key]
        if hasattr(args, attribute) and getattr(args, attribute) is None:
            try:
                setattr(args, attribute, parser(value))
            except ValueError:
                raise DomainError(f"config value for {key} is not valid: {value!r}", key, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [name for name in names if getattr(args, name, None) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise ArgumentError(f"{args.command} needs {flags}", missing[0])


def _knowledge(args: argparse.Namespace) -> CorrelationKnowledge:
    _require(args, "rho")
    return CorrelationKnowledge.from_text(args.rho)


def _alternative(args: argparse.Namespace, n: int) -> AlternativeConfig:
    text = getattr(args, "false_null_means", None)
    if text:
        return AlternativeConfig(n=n, segments=parse_mean_segments(text))
    n1 = getattr(args, "n1", None)
    if n1 is not None:
        return AlternativeConfig.homogeneous(n, parse_count(n1, "n1"), args.mu)
    return AlternativeConfig.global_null(n)


def _default_reps(method: str, reps: Optional[int]) -> Optional[int]:
    if method == "quadrature":
        return None
    if reps is not None:
        return require_int_at_least(reps, 1, "reps")
    return DEFAULT_FAST_REPS if method == "mc-fast" else DEFAULT_FULL_REPS


def _procedure_label(knowledge: CorrelationKnowledge, cutoff_kind: str) -> str:
    if CutoffKind(cutoff_kind) is CutoffKind.BONFERRONI:
        return ProcedureKind.BONFERRONI.value
    return ProcedureKind.TEST_I.value if knowledge.is_known else ProcedureKind.TEST_II.value


def cmd_fwer(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """One FWER estimate by quadrature, fast scheme or full-vector simulation."""
    _require(args, "n", "alpha")
    n = parse_count(args.n, "n")
    knowledge = _knowledge(args)
    alt = _alternative(args, n)
    method = args.method

    if method in ("quadrature", "mc-fast") and not knowledge.is_known:
        raise ArgumentError(f"method {method} needs a numeric --rho", "rho")
    if args.cutoff == CutoffKind.BONFERRONI.value and not knowledge.is_known and method != "mc-full":
        raise ArgumentError("the Bonferroni cutoff with an estimated rho needs --method mc-full", "rho")

    if method == "quadrature":
        rho = knowledge.rho
        cutoff = common_cutoff(CutoffKind(args.cutoff), n, args.alpha, rho)
        estimate, se, seed = exact_fwer_equicorr(n, cutoff, rho, n0=alt.n0), None, None
    elif method == "mc-fast":
        if not alt.is_global_null:
            raise ArgumentError("mc-fast runs under the global null only", "false_null_means")
        rho = knowledge.rho
        cutoff = common_cutoff(CutoffKind(args.cutoff), n, args.alpha, rho)
        result = simulate_fwer_fast(n, args.alpha, rho, args.reps, args.seed, cutoff=cutoff, workers=args.threads)
        estimate, se, seed = result.estimate, result.std_error, result.seed
    else:
        rho = knowledge.rho if knowledge.is_known else args.data_rho
        plan = SimulationPlan(
            config=ProcedureConfig(n=n, alpha=args.alpha, rho=knowledge),
            alt=alt,
            reps=args.reps,
            seed=args.seed,
            procedure=ProcedureKind.BONFERRONI if args.cutoff == CutoffKind.BONFERRONI.value else None,
            data_rho=args.data_rho,
            workers=args.threads,
        )
        result = simulate_full(plan)
        estimate, se, seed = result.estimate, result.std_error, result.seed

    writer.header(FWER_COLUMNS)
    writer.row([n, args.alpha, rho, method, estimate, se, args.reps, seed, _procedure_label(knowledge, args.cutoff)])
    return "completed"


def cmd_table(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """Reproduce a published table cell by cell; stops cleanly on SIGINT/SIGTERM."""
    spec = get_table(args.table)
    reps = args.reps
    logger.info(f"Reproducing {spec.caption} with {reps} reps per cell")
    shutdown.start_listening()

    writer.header(TABLE_COLUMNS)
    for cell in spec.cells():
        if shutdown.should_shutdown:
            logger.warning(f"Table {spec.table_id} cancelled after {cell.index} cells")
            return "cancelled"
        seed = cell_seed(args.seed, spec.table_id, cell.index)
        quadrature = None
        if spec.estimate_rho:
            plan = SimulationPlan(
                config=ProcedureConfig(n=cell.n, alpha=spec.alpha, rho=CorrelationKnowledge.estimate()),
                reps=reps,
                seed=seed,
                data_rho=cell.rho,
                workers=args.threads,
            )
            result = simulate_full(plan)
        else:
            result = simulate_fwer_fast(cell.n, spec.alpha, cell.rho, reps, seed, workers=args.threads)
            if not args.no_quadrature:
                cutoff = proposed_cutoff(cell.n, spec.alpha, cell.rho)
                quadrature = exact_fwer_equicorr(cell.n, cutoff, cell.rho)
        writer.row([
            spec.table_id, cell.n, spec.alpha, cell.rho, spec.method,
            result.estimate, result.std_error, reps, seed, quadrature, cell.published,
        ])
        writer.flush()
    return "completed"


def cmd_power(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """Disjunctive power of the proposed or Bonferroni cutoff."""
    _require(args, "n", "alpha")
    n = parse_count(args.n, "n")
    knowledge = _knowledge(args)
    alt = _alternative(args, n)
    if alt.n1 == 0:
        raise ArgumentError("power needs false nulls: give --n1/--mu or --false-null-means", "n1")
    method = args.method
    if method == "mc-fast":
        raise ArgumentError("power is estimated by quadrature or mc-full", "method")

    if method == "quadrature":
        if not knowledge.is_known:
            raise ArgumentError("quadrature needs a numeric --rho", "rho")
        rho = knowledge.rho
        cutoff = common_cutoff(CutoffKind(args.cutoff), n, args.alpha, rho)
        estimate, se, seed = exact_anypwr(cutoff, rho, alt), None, None
    else:
        rho = knowledge.rho if knowledge.is_known else args.data_rho
        plan = SimulationPlan(
            config=ProcedureConfig(n=n, alpha=args.alpha, rho=knowledge),
            alt=alt,
            metric=Metric.ANYPWR,
            reps=args.reps,
            seed=args.seed,
            procedure=ProcedureKind.BONFERRONI if args.cutoff == CutoffKind.BONFERRONI.value else None,
            data_rho=args.data_rho,
            workers=args.threads,
        )
        result = simulate_power(plan)
        estimate, se, seed = result.estimate, result.std_error, result.seed

    writer.header(POWER_COLUMNS)
    writer.row([n, args.alpha, rho, alt.n1, _procedure_label(knowledge, args.cutoff), method, estimate, se,
                args.reps, seed])
    return "completed"


def cmd_kfwer(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """Probability of k or more false rejections under the global null."""
    _require(args, "n", "k", "alpha")
    n = parse_count(args.n, "n")
    k = parse_count(args.k, "k")
    knowledge = _knowledge(args)
    method = args.method
    if method in ("quadrature", "mc-fast") and not knowledge.is_known:
        raise ArgumentError(f"method {method} needs a numeric --rho", "rho")

    if method == "quadrature":
        rho = knowledge.rho
        estimate, se, seed = exact_kfwer_equicorr(n, k, proposed_cutoff(n, args.alpha, rho), rho), None, None
    elif method == "mc-fast":
        rho = knowledge.rho
        result = simulate_kfwer_fast(n, k, args.alpha, rho, args.reps, args.seed, workers=args.threads)
        estimate, se, seed = result.estimate, result.std_error, result.seed
    else:
        rho = knowledge.rho if knowledge.is_known else args.data_rho
        plan = SimulationPlan(
            config=ProcedureConfig(n=n, alpha=args.alpha, rho=knowledge),
            metric=Metric.KFWER,
            k=k,
            reps=args.reps,
            seed=args.seed,
            scheme=Scheme.FULL_VECTOR,
            data_rho=args.data_rho,
            workers=args.threads,
        )
        result = simulate_full(plan)
        estimate, se, seed = result.estimate, result.std_error, result.seed

    writer.header(KFWER_COLUMNS)
    writer.row([n, k, args.alpha, rho, method, estimate, se, args.reps, seed])
    return "completed"


def cmd_estimate_rho(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """Paired-difference estimate of rho from one data vector."""
    values = load_statistics(args.data)
    estimate = rho_hat_star(values)
    writer.header(ESTIMATE_COLUMNS)
    writer.row([values.size, estimate.m, estimate.value, estimate.raw_mean])
    return "completed"


def cmd_reject(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """Decision per hypothesis: index (1-based), statistic, cutoff, rejected."""
    _require(args, "alpha")
    values = load_statistics(args.data)
    blocks = BlockStructure.parse(args.blocks) if args.blocks else None
    rho = None

    if args.cutoff == CutoffKind.BONFERRONI.value:
        kind = ProcedureKind.BONFERRONI
    elif blocks is not None:
        kind = ProcedureKind.TEST_III
    else:
        knowledge = _knowledge(args)
        kind = ProcedureKind.TEST_I if knowledge.is_known else ProcedureKind.TEST_II
        rho = knowledge.rho

    summary = apply_procedure(values, kind, args.alpha, rho=rho, blocks=blocks)
    cutoffs = cutoff_vector(summary, blocks)
    logger.info(f"{kind.value}: rejected {summary.n_rejected} of {values.size} hypotheses (rho used {summary.rho_used})")

    writer.header(REJECT_COLUMNS)
    for index, (statistic, cutoff, rejected) in enumerate(zip(values, cutoffs, summary.rejected), 1):
        writer.row([index, statistic, cutoff, bool(rejected)])
    return "completed"


def cmd_block(args: argparse.Namespace, writer: ResultWriter, shutdown: GracefulShutdownHandler) -> str:
    """FWER of the block procedure by full-vector simulation or by the product formula."""
    _require(args, "blocks", "alpha")
    blocks = BlockStructure.parse(args.blocks)
    alt = _alternative(args, blocks.n)
    method = args.method

    if method == "quadrature":
        if args.cross_rho:
            raise ArgumentError("cross-block correlation has no quadrature form; use --method mc-full", "cross_rho")
        estimate, se, seed = exact_fwer_block(blocks, alt.true_nulls_per_block(blocks), args.alpha), None, None
    elif method == "mc-full":
        result = simulate_block_fwer(blocks, args.alpha, alt, args.reps, args.seed, args.cross_rho, args.threads)
        estimate, se, seed = result.estimate, result.std_error, result.seed
    else:
        raise ArgumentError("block FWER is evaluated by quadrature or mc-full", "method")

    writer.header(BLOCK_COLUMNS)
    writer.row([blocks.m, blocks.n, args.alpha, args.cross_rho, method, estimate, se, args.reps, seed])
    return "completed"


def _add_common(parser: argparse.ArgumentParser, stochastic: bool = True) -> None:
    parser.add_argument("--out", help="write CSV to FILE and the manifest to FILE.manifest")
    parser.add_argument("--config", help="key = value file supplying unset flags")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    if stochastic:
        parser.add_argument("--reps", type=int, help="Monte Carlo replications")
        parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        parser.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equicorr-fwer",
        description="Single-step FWER procedures for equicorrelated Gaussian statistics",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    fwer = commands.add_parser("fwer", help="FWER of a common cutoff")
    fwer.add_argument("--n", help="number of hypotheses (1e9 accepted)")
    fwer.add_argument("--alpha", type=float)
    fwer.add_argument("--rho", help="known rho, or 'estimate'")
    fwer.add_argument("--data-rho", dest="data_rho", type=float, help="data-generating rho when --rho estimate")
    fwer.add_argument("--method", choices=METHODS, default="quadrature")
    fwer.add_argument("--cutoff", choices=CUTOFFS, default="proposed")
    fwer.add_argument("--false-null-means", dest="false_null_means", help="1-based index:mu or start-stop:mu list")
    _add_common(fwer)
    fwer.set_defaults(handler=cmd_fwer)

    table = commands.add_parser("table", help="reproduce a published table")
    table.add_argument("--table", type=int, required=True, choices=range(1, 9), metavar="{1..8}")
    table.add_argument("--no-quadrature", dest="no_quadrature", action="store_true",
                       help="skip the quadrature column of Tables 1-4")
    _add_common(table)
    table.set_defaults(handler=cmd_table, method=None)

    power = commands.add_parser("power", help="disjunctive power under an alternative")
    power.add_argument("--n")
    power.add_argument("--alpha", type=float)
    power.add_argument("--rho", help="known rho, or 'estimate'")
    power.add_argument("--data-rho", dest="data_rho", type=float)
    power.add_argument("--n1", help="number of leading false nulls")
    power.add_argument("--mu", type=float, default=1.0, help="common false-null mean (default 1)")
    power.add_argument("--false-null-means", dest="false_null_means")
    power.add_argument("--method", choices=METHODS, default="quadrature")
    power.add_argument("--cutoff", choices=CUTOFFS, default="proposed")
    _add_common(power)
    power.set_defaults(handler=cmd_power)

    kfwer = commands.add_parser("kfwer", help="k-FWER of the proposed cutoff")
    kfwer.add_argument("--n")
    kfwer.add_argument("--k")
    kfwer.add_argument("--alpha", type=float)
    kfwer.add_argument("--rho", help="known rho, or 'estimate'")
    kfwer.add_argument("--data-rho", dest="data_rho", type=float)
    kfwer.add_argument("--method", choices=METHODS, default="quadrature")
    _add_common(kfwer)
    kfwer.set_defaults(handler=cmd_kfwer)

    estimate = commands.add_parser("estimate-rho", help="estimate rho from a data file")
    estimate.add_argument("data", help="newline-separated statistics")
    _add_common(estimate, stochastic=False)
    estimate.set_defaults(handler=cmd_estimate_rho, method=None)

    reject = commands.add_parser("reject", help="apply a test procedure to a data file")
    reject.add_argument("data", help="newline-separated statistics")
    reject.add_argument("--alpha", type=float)
    reject.add_argument("--rho", help="known rho, or 'estimate'")
    reject.add_argument("--blocks", help="k:rho,k:rho,... for the block procedure")
    reject.add_argument("--cutoff", choices=CUTOFFS, default="proposed")
    _add_common(reject, stochastic=False)
    reject.set_defaults(handler=cmd_reject, method=None)

    block = commands.add_parser("block", help="FWER of the block procedure")
    block.add_argument("--blocks", help="k:rho,k:rho,...")
    block.add_argument("--alpha", type=float)
    block.add_argument("--cross-rho", dest="cross_rho", type=float, default=0.0,
                       help="extra correlation shared across blocks (mc-full only)")
    block.add_argument("--false-null-means", dest="false_null_means")
    block.add_argument("--method", choices=("quadrature", "mc-full"), default="mc-full")
    _add_common(block)
    block.set_defaults(handler=cmd_block)

    return parser


def _manifest_parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: value for key, value in vars(args).items() if key not in ("handler", "log_level")}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging_from_env("src", args.log_level)

    shutdown_handler = GracefulShutdownHandler("src.harness.cli")
    streams = OutputStreamManager(shutdown_handler, "src.harness.cli")
    manifest: Optional[RunManifest] = None
    exit_code = EXIT_OK
    error_message = None
    try:
        _apply_config(args)
        if args.command == "table":
            default = DEFAULT_FULL_REPS if get_table(args.table).estimate_rho else DEFAULT_FAST_REPS
            args.reps = require_int_at_least(args.reps if args.reps is not None else default, 1, "reps")
        elif hasattr(args, "reps"):
            args.reps = _default_reps(args.method, args.reps)
        manifest = RunManifest.start(
            args.command,
            _manifest_parameters(args),
            seed=getattr(args, "seed", None),
            reps=getattr(args, "reps", None),
        )
        stream = streams.open(args.out) if args.out else sys.stdout
        writer = ResultWriter(stream)
        status = args.handler(args, writer, shutdown_handler)
        manifest.rows_written = writer.rows
        manifest.finish(status)
    except ArgumentError as e:
        logger.error(f"Usage error ({e.parameter}): {e}")
        error_message = str(e)
        exit_code = EXIT_USAGE
    except DomainError as e:
        logger.error(f"Domain error in parameter {e.parameter}: {e}")
        error_message = str(e)
        exit_code = EXIT_DOMAIN
    except Exception as e:
        logger.error(f"Command {args.command} failed: {e}")
        error_message = str(e)
        exit_code = EXIT_FAILURE
    finally:
        shutdown_handler.cleanup()

    if manifest is not None:
        if manifest.status == 'running':
            manifest.finish('failed', error_message=error_message)
        manifest.emit(args.out)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
