"""
Point d'entrée de la ligne de commande

Codes de sortie : 0 succès, 1 erreur métier (ligne `error[<code>]: ...` sur
stderr), 2 erreur d'utilisation (option inconnue, fichier manquant).
"""

import argparse
import sys
from datetime import datetime
from pathlib import Path

import structlog
from pydantic import BaseModel, TypeAdapter, ValidationError

from app.carbon.intensity import BUNDLED_TABLE, load_annual_csv, load_series_csv
from app.carbon.shifting import best_start_time, load_profile_csv, scale_profile
from app.cli.render import render_report
from app.core.config import settings
from app.core.errors import FootprintError, InvalidInput
from app.core.logging import configure_logging
from app.estimate import service as estimate_service
from app.estimate.schemas import BulkRequest, CoreHoursRequest, FootprintReport
from app.model.loader import describe_errors, load_cluster, load_model, load_node, load_workflow
from app.power.schemas import PowerModel
from app.sched.consolidate import consolidate
from app.sched.dvfs import dvfs_sweep
from app.sched.schemas import ConsolidationTask, ScheduleRequest
from app.sched.service import run_schedule
from app.trace.parser import FORMATS, decode_trace, parse_trace
from app.trace.schemas import TraceMetadata

logger = structlog.get_logger(__name__)

# Options dont la valeur est un fichier à vérifier avant exécution
FILE_OPTIONS = (
    "bulk", "core_hours", "trace", "cluster", "ci_series", "dag",
    "profile", "node", "tasks", "report", "compare", "ci_table",
)


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _window(text: str) -> tuple[datetime, datetime]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("window must be <start>,<end>")
    try:
        return tuple(datetime.fromisoformat(p.strip().replace("Z", "+00:00")) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--output", "-o", help="Fichier de sortie (stdout par défaut)")


def _add_context(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pue", type=float)
    parser.add_argument("--ci", type=float, help="Intensité carbone en gCO2e/kWh")
    parser.add_argument("--ci-region")
    parser.add_argument("--ci-year", type=int)
    parser.add_argument("--ci-series", help="CSV timestamp,gco2e_per_kwh")
    parser.add_argument("--ci-table", help="CSV region,year,gco2e_per_kwh remplaçant la table annuelle")
    parser.add_argument("--coeffs", help=f"Jeu de coefficients ou fichier JSON (défaut {settings.COEFFICIENT_SET})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="footprint",
        description="Empreinte carbone et ordonnancement énergétique de workflows",
    )
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    estimate = sub.add_parser("estimate", help="Énergie et émissions d'un run")
    source = estimate.add_mutually_exclusive_group(required=True)
    source.add_argument("--bulk", help="Run global (JSON)")
    source.add_argument("--core-hours", help="Run en heures-cœur (JSON)")
    source.add_argument("--trace", help="Trace canonique")
    source.add_argument("--storage-tb", type=float, help="Stockage SSD sur un an")
    estimate.add_argument("--cluster", help="Cluster (JSON), requis avec --trace")
    estimate.add_argument("--trace-format", choices=FORMATS, default="canonical-csv")
    estimate.add_argument("--memory-attribution", choices=("allocated_gb", "full_node"), default="allocated_gb")
    estimate.add_argument("--attribute-storage", action="store_true")
    estimate.add_argument("--repetitions", type=int)
    estimate.add_argument("--assumptions", action="store_true")
    _add_context(estimate)
    _add_output(estimate)

    schedule = sub.add_parser("schedule", help="Ordonnancement d'un workflow")
    schedule.add_argument("--dag", required=True)
    schedule.add_argument("--cluster", required=True)
    schedule.add_argument("--algo", choices=("heft", "greenheft", "moheft", "brute"), default="heft")
    schedule.add_argument("--k", type=int, default=8)
    schedule.add_argument("--comm-rate", type=float, default=0.0)
    schedule.add_argument("--idle-accounting", action="store_true")
    schedule.add_argument("--coeffs")
    _add_output(schedule)

    shift = sub.add_parser("shift", help="Meilleure heure de démarrage")
    shift.add_argument("--profile", required=True, help="CSV duration_s,watts")
    shift.add_argument("--ci-series", required=True)
    shift.add_argument("--ci-region", default="series")
    shift.add_argument("--window", type=_window, required=True)
    shift.add_argument("--step-s", type=float, required=True)
    shift.add_argument("--pue", type=float, default=1.0)
    _add_output(shift)

    dvfs = sub.add_parser("whatif-dvfs", help="Analyse what-if DVFS")
    dvfs.add_argument("--runtime-s", type=float, required=True)
    dvfs.add_argument("--utilisation", type=float, required=True)
    dvfs.add_argument("--beta", type=float, default=1.0, help="Fraction liée au CPU")
    dvfs.add_argument("--node", help="Nœud (JSON) : modèle CPU et ratios admissibles")
    dvfs.add_argument("--static-w", type=float)
    dvfs.add_argument("--peak-w", type=float)
    dvfs.add_argument("--ratios", type=_floats)
    dvfs.add_argument("--alpha", type=float)
    _add_output(dvfs)

    cons = sub.add_parser("consolidate", help="Consolidation sur le moins de nœuds possible")
    cons.add_argument("--tasks", required=True, help="Liste JSON de {cores, duration_s, utilisation}")
    cons.add_argument("--cluster", required=True)
    _add_output(cons)

    report = sub.add_parser("report", help="Rendu d'un rapport JSON enregistré")
    report.add_argument("report")
    report.add_argument("--compare", help="Second rapport : ratios rapport / second")
    report.add_argument("--assumptions", action="store_true")
    _add_output(report)

    return parser


def _check_files(args: argparse.Namespace) -> None:
    for name in FILE_OPTIONS:
        value = getattr(args, name, None)
        if value is not None and not Path(value).is_file():
            raise UsageError(f"file not found: {value}")


# --- Sous-commandes ---

def _estimate(args: argparse.Namespace) -> BaseModel:
    # les lignes du fichier remplacent celles de la table embarquée
    table = {**BUNDLED_TABLE, **load_annual_csv(args.ci_table)} if args.ci_table else None

    if args.storage_tb is not None:
        ctx = estimate_service.build_context(
            args.pue, args.coeffs, args.ci, None, args.ci_region, args.ci_year, table=table
        )
        return estimate_service.storage_year_estimate(args.storage_tb, ctx.coeffs, ctx.pue, ctx.ci)

    series = load_series_csv(args.ci_series, args.ci_region or "series") if args.ci_series else None

    if args.bulk:
        request = load_model(args.bulk, BulkRequest)
        ctx = estimate_service.build_context(
            args.pue if args.pue is not None else request.pue,
            args.coeffs,
            args.ci if args.ci is not None else request.ci,
            series,
            args.ci_region or request.region,
            args.ci_year if args.ci_year is not None else request.year,
            table=table,
        )
        repetitions = args.repetitions if args.repetitions is not None else request.repetitions
        return estimate_service.estimate_bulk(request.run, request.node, ctx, repetitions)

    if args.core_hours:
        request = load_model(args.core_hours, CoreHoursRequest)
        ctx = estimate_service.build_context(
            args.pue if args.pue is not None else request.pue,
            args.coeffs,
            args.ci if args.ci is not None else request.ci,
            series,
            args.ci_region or request.region,
            args.ci_year if args.ci_year is not None else request.year,
            table=table,
        )
        return estimate_service.estimate_core_hours(request.run, ctx)

    if not args.cluster:
        raise UsageError("--trace requires --cluster")
    cluster = load_cluster(args.cluster)
    trace = parse_trace(
        decode_trace(Path(args.trace).read_bytes()),
        args.trace_format,
        TraceMetadata(workflow_name=Path(args.trace).stem, cluster_id=Path(args.cluster).stem),
    )
    ctx = estimate_service.build_context(
        args.pue if args.pue is not None else cluster.pue,
        args.coeffs,
        args.ci,
        series,
        args.ci_region or cluster.region or None,
        args.ci_year,
        estimate_service.trace_start(trace),
        table=table,
    )
    return estimate_service.estimate_trace(
        trace, cluster, ctx,
        memory_attribution=args.memory_attribution,
        attribute_storage=args.attribute_storage,
    )


def _schedule(args: argparse.Namespace) -> BaseModel:
    dag, cluster = load_workflow(args.dag), load_cluster(args.cluster)
    try:
        request = ScheduleRequest(
            algo=args.algo,
            k=args.k,
            dag=dag,
            cluster=cluster,
            comm_rate=args.comm_rate,
            idle_accounting=args.idle_accounting,
        )
    except ValidationError as e:
        raise InvalidInput(describe_errors(e)) from e
    return run_schedule(request, args.coeffs)


def _shift(args: argparse.Namespace) -> BaseModel:
    profile = scale_profile(load_profile_csv(args.profile), args.pue)
    series = load_series_csv(args.ci_series, args.ci_region)
    return best_start_time(profile, series, args.window, args.step_s)


def _whatif_dvfs(args: argparse.Namespace) -> BaseModel:
    if args.node:
        node = load_node(args.node)
        model, ratios = node.cpu, args.ratios or list(node.max_frequency_ratio)
    elif args.static_w is not None and args.peak_w is not None:
        try:
            model = PowerModel(static_w=args.static_w, peak_w=args.peak_w)
        except ValidationError as e:
            raise InvalidInput(describe_errors(e)) from e
        ratios = args.ratios or [1.0]
    else:
        raise UsageError("whatif-dvfs needs --node or both --static-w and --peak-w")
    return dvfs_sweep(args.runtime_s, args.utilisation, args.beta, model, ratios, args.alpha)


def _consolidate(args: argparse.Namespace) -> BaseModel:
    try:
        tasks = TypeAdapter(list[ConsolidationTask]).validate_json(Path(args.tasks).read_bytes())
    except ValidationError as e:
        raise InvalidInput(f"{args.tasks}: {describe_errors(e)}") from e
    return consolidate(tasks, load_cluster(args.cluster))


def _report(args: argparse.Namespace) -> BaseModel:
    report = load_model(args.report, FootprintReport)
    if args.compare:
        return estimate_service.compare_reports(report, load_model(args.compare, FootprintReport))
    return report


COMMANDS = {
    "estimate": _estimate,
    "schedule": _schedule,
    "shift": _shift,
    "whatif-dvfs": _whatif_dvfs,
    "consolidate": _consolidate,
    "report": _report,
}


def main(argv: list[str] | None = None) -> int:
    """
    Exécute une invocation de la CLI

    Returns:
        int: Code de sortie (0, 1 ou 2)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level)
    try:
        _check_files(args)
        result = COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except FootprintError as e:
        print(e.render(), file=sys.stderr)
        return 1

    output = render_report(result, args.format, getattr(args, "assumptions", False))
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    logger.debug("commande terminée", command=args.command)
    return 0
