"""
Command-line front end.

    python main.py volume 2 0 --by-cylinders --format json
    python main.py carea 2 0 --method both
    python main.py stats --graph "g:0,1;l:|;e:0-0,0-1" --moment e1/e2

Every command builds a list of OutputRecords; the renderers turn them into
text, JSON or CSV.  Decimals are always derived from the exact values.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from constants import (
    CAREA_METHODS,
    CONVENTION_NOTES,
    DEFAULT_CACHE_DIR,
    DEFAULT_DIGITS,
    DEFAULT_FORMAT,
    DEFAULT_WORKERS,
    ENV_CACHE_DIR,
    ENV_WORKERS,
    EXIT_CONSISTENCY,
    EXIT_DOMAIN,
    EXIT_OK,
    FORMATS,
    LOG_FORMAT,
    LOG_LEVELS,
    MAX_DIGITS,
)
from quadvol import asymptotics, frequencies, siegel_veech, statistics, volumes
from quadvol.correlators import CACHE_FILE_NAME, psi_correlator, store_cache, warm_from_cache
from quadvol.errors import ConsistencyError, DomainError
from quadvol.exact_arith import (
    DIVERGENT,
    PiMonomial,
    ZetaExpr,
    ZetaQuotient,
    evaluate_zeta_expr,
    rational_to_decimal,
    rational_to_json,
)
from quadvol.stable_graphs import enumerate_stable_graphs, graph_from_encoding, to_dot

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Records and rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutputRecord:
    quantity: str
    exact: object
    provenance: str
    note: str = ""
    details: dict = field(default_factory=dict, compare=False)

    def exact_json(self):
        value = self.exact
        if isinstance(value, bool) or isinstance(value, str):
            return value
        if isinstance(value, (int, Fraction)):
            return rational_to_json(value)
        if isinstance(value, (PiMonomial, ZetaExpr, ZetaQuotient)):
            return value.to_json()
        if isinstance(value, mpmath.mpf):
            return mpmath.nstr(value, 30)
        return str(value)

    def exact_text(self) -> str:
        if isinstance(self.exact, bool):
            return "true" if self.exact else "false"
        if isinstance(self.exact, mpmath.mpf):
            return mpmath.nstr(self.exact, 30)
        return str(self.exact)

    def decimal(self, digits: int) -> Optional[str]:
        value = self.exact
        if isinstance(value, bool) or value is None:
            return None
        if isinstance(value, str):
            return value if value == DIVERGENT else None
        if isinstance(value, (int, Fraction)):
            return rational_to_decimal(value, digits)
        if isinstance(value, PiMonomial):
            return value.to_decimal(digits)
        if isinstance(value, (ZetaExpr, ZetaQuotient)):
            return evaluate_zeta_expr(value, digits)
        if isinstance(value, mpmath.mpf):
            return mpmath.nstr(value, digits)
        return None

    def to_json(self, digits: int) -> dict:
        out = {
            "quantity": self.quantity,
            "exact": self.exact_json(),
            "decimal": self.decimal(digits),
            "provenance": self.provenance,
        }
        if self.note:
            out["note"] = self.note
        if self.details:
            out["details"] = self.details
        return out


def render_text(records: Sequence[OutputRecord], digits: int) -> str:
    lines = []
    for rec in records:
        line = f"{rec.quantity} = {rec.exact_text()}"
        dec = rec.decimal(digits)
        if dec is not None and dec != rec.exact_text():
            line += f"  ~ {dec}"
        if rec.note:
            line += f"  [{rec.note}]"
        lines.append(line)
    return "\n".join(lines) + "\n"


def render_json(records: Sequence[OutputRecord], digits: int) -> str:
    return json.dumps([rec.to_json(digits) for rec in records], indent=2) + "\n"


def render_csv(records: Sequence[OutputRecord], digits: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["quantity", "exact", "decimal", "provenance"])
    for rec in records:
        writer.writerow([rec.quantity, rec.exact_text(), rec.decimal(digits) or "", rec.provenance])
    return buf.getvalue()


RENDERERS = {"text": render_text, "json": render_json, "csv": render_csv}


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _digits(text: str) -> int:
    value = int(text)
    if not 1 <= value <= MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"digits must lie in 1..{MAX_DIGITS}")
    return value


def _env_workers() -> int:
    raw = os.environ.get(ENV_WORKERS)
    if not raw:
        return DEFAULT_WORKERS
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring %s=%r", ENV_WORKERS, raw)
        return DEFAULT_WORKERS


def _q(g: int, n: int) -> str:
    return f"Q_{{{g},{n}}}"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_volume(args) -> list[OutputRecord]:
    g, n = args.g, args.n
    total = volumes.masur_veech_volume(g, n, workers=args.workers)
    records = [OutputRecord(f"Vol {_q(g, n)}", total, "volumes.masur_veech_volume", CONVENTION_NOTES.get((g, n), ""))]
    if (g, n) == (0, 3):
        return records
    report = volumes.volume_breakdown(g, n, labeled=args.labeled, workers=args.workers)
    if args.by_cylinders:
        for k, vol in report.by_cylinders.items():
            records.append(OutputRecord(f"Vol_{k}cyl {_q(g, n)}", vol, "volumes.volume_breakdown"))
    if args.by_graph:
        for c in report.contributions:
            records.append(OutputRecord(
                f"Vol({c.encoding})", c.volume, "volumes.graph_contribution",
                f"|Aut| = {c.aut}", {"polynomial": str(c.polynomial), "cylinders": c.cylinder_count},
            ))
    return records


def cmd_carea(args) -> list[OutputRecord]:
    g, n = args.g, args.n
    volumes.volume_breakdown(g, n, workers=args.workers)
    results = siegel_veech.carea(g, n, args.method)
    records = [
        OutputRecord(f"pi^2/3 c_area {_q(g, n)} [{name}]", res.value, f"siegel_veech.carea_{name}")
        for name, res in results.items()
    ]
    if args.method == "both":
        records.append(OutputRecord("agree", True, "siegel_veech.carea"))
    return records


def cmd_lyapunov(args) -> list[OutputRecord]:
    g, n = args.g, args.n
    volumes.volume_breakdown(g, n, workers=args.workers)
    plus, minus = siegel_veech.lyapunov_sums(g, n)
    return [
        OutputRecord(f"Lambda+ {_q(g, n)}", plus, "siegel_veech.lyapunov_sums"),
        OutputRecord(f"Lambda- {_q(g, n)}", minus, "siegel_veech.lyapunov_sums"),
    ]


def cmd_graphs(args) -> list[OutputRecord] | str:
    graphs = enumerate_stable_graphs(args.g, args.n, labeled=args.labeled)
    if args.dot:
        return "\n".join(to_dot(G, f"G{i}") for i, G in enumerate(graphs)) + "\n"
    records = []
    for c in map(volumes.graph_contribution, graphs):
        records.append(OutputRecord(
            f"Vol({c.encoding})", c.volume, "volumes.graph_contribution",
            f"|Aut| = {c.aut}, {c.cylinder_count} cylinders",
        ))
    return records


def cmd_freq(args) -> list[OutputRecord]:
    if args.sep_ratio is not None:
        g = args.sep_ratio
        return [
            OutputRecord(f"c(sep)/c(nonsep) g={g}", frequencies.sep_nonsep_ratio(g), "frequencies.sep_nonsep_ratio"),
            OutputRecord(f"deviation g={g}", frequencies.sep_nonsep_deviation(g), "frequencies.sep_nonsep_deviation"),
        ]
    if args.six_punctured:
        three, two = frequencies.six_punctured_sphere_split()
        return [
            OutputRecord("share 3+3", three, "frequencies.six_punctured_sphere_split"),
            OutputRecord("share 2+4", two, "frequencies.six_punctured_sphere_split"),
        ]
    if args.ball is not None:
        g, n = args.ball
        b = frequencies.b_gn(g, n, allow_exceptional=args.allow_exceptional)
        return [OutputRecord(f"b_{{{g},{n}}}", b, "frequencies.b_gn")]
    if args.graph is None:
        raise DomainError("freq needs one of --graph, --sep-ratio, --six-punctured or --ball")
    graph = graph_from_encoding(args.graph)
    weights = args.weights or (1,) * graph.n_edges
    if not args.allow_exceptional:
        frequencies.c_gamma(graph, weights)
    report = frequencies.frequency_report(frequencies.WeightedMulticurve(graph, weights))
    note = ", ".join(report.flags)
    return [
        OutputRecord("c(gamma)", report.c_gamma, "frequencies.c_gamma", note),
        OutputRecord("c~(gamma)", report.c_tilde, "frequencies.c_tilde", note),
    ]


def cmd_corr(args) -> list[OutputRecord]:
    value = psi_correlator(args.g, args.d)
    inner = " ".join(f"tau_{d}" for d in args.d)
    return [OutputRecord(f"<{inner}>_{args.g}", value, "correlators.psi_correlator")]


def cmd_agk(args) -> list[OutputRecord]:
    row = asymptotics.verified_a_gk_row(args.g)
    return [
        OutputRecord(f"a_{{{g},{k}}}", a, "asymptotics.verified_a_gk_row")
        for g, k, a in row.to_csv_rows()
    ]


def _expectation_record(query: statistics.ExpectationQuery) -> OutputRecord:
    value = statistics.expectation(query)
    if isinstance(value, ZetaQuotient):
        if value.is_divergent():
            value = DIVERGENT
        else:
            value = value.exact() or value
    return OutputRecord(f"E[b^{list(query.moment.powers)}]", value, "statistics.expectation")


def cmd_stats(args) -> list[OutputRecord]:
    if args.graph is None:
        if args.g is None or args.n is None:
            raise DomainError("stats needs g and n, or --graph")
        if args.height_one:
            p, _ = statistics.height_one_probability(args.g, args.n)
            return [OutputRecord(f"P(height 1) {_q(args.g, args.n)}", p, "statistics.height_one_probability")]
        volumes.volume_breakdown(args.g, args.n, workers=args.workers)
        dist = statistics.cylinder_distribution(args.g, args.n)
        records = [
            OutputRecord(f"p_{k} {_q(args.g, args.n)}", p, "statistics.cylinder_distribution")
            for k, p in dist.probabilities
        ]
        records.append(OutputRecord(f"mean cylinders {_q(args.g, args.n)}", dist.mean(), "statistics.cylinder_distribution"))
        return records

    graph = graph_from_encoding(args.graph)
    if args.bound is not None:
        p = statistics.bounded_height_probability(graph, args.bound)
        value = p.exact() or p
        return [OutputRecord(f"P(heights <= {args.bound})", value, "statistics.bounded_height_probability")]
    if args.moment is None:
        raise DomainError("stats --graph needs --moment or --bound")
    moment = statistics.Moment.parse(args.moment, graph.n_edges)
    if args.normalized:
        if args.heights is None:
            raise DomainError("--normalized needs --heights")
        value = statistics.normalized_moment(graph, moment.powers, args.heights)
        return [OutputRecord(f"E[x^{list(moment.powers)}]", value, "statistics.normalized_moment")]
    return [_expectation_record(statistics.ExpectationQuery(graph, moment, args.heights))]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_gn(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("g", type=int)
    parser.add_argument("n", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=DEFAULT_FORMAT)
    common.add_argument("--digits", type=_digits, default=DEFAULT_DIGITS)
    common.add_argument("--no-cache", action="store_true", help="do not read or write the correlator cache")
    common.add_argument("--cache-dir", default=None, help=f"cache directory (default ${ENV_CACHE_DIR} or {DEFAULT_CACHE_DIR})")
    common.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${ENV_WORKERS} or 1)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="quadvol", description="Exact Masur-Veech volumes and related invariants.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("volume", parents=[common], help="Vol Q_{g,n} and its breakdowns")
    _add_gn(p)
    p.add_argument("--by-graph", action="store_true")
    p.add_argument("--by-cylinders", action="store_true")
    p.add_argument("--labeled", action="store_true", help="break down over graphs with labeled legs")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("carea", parents=[common], help="area Siegel-Veech constant (times pi^2/3)")
    _add_gn(p)
    p.add_argument("--method", choices=CAREA_METHODS, default="both")
    p.set_defaults(func=cmd_carea)

    p = sub.add_parser("lyapunov", parents=[common], help="sums of Lyapunov exponents")
    _add_gn(p)
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("graphs", parents=[common], help="list stable graphs")
    _add_gn(p)
    p.add_argument("--labeled", action="store_true")
    p.add_argument("--dot", action="store_true", help="print Graphviz DOT instead of records")
    p.set_defaults(func=cmd_graphs)

    p = sub.add_parser("freq", parents=[common], help="frequencies of multicurves")
    p.add_argument("--graph", help="canonical encoding of a graph with labeled legs")
    p.add_argument("--weights", type=_int_list)
    p.add_argument("--allow-exceptional", action="store_true")
    p.add_argument("--sep-ratio", type=int, metavar="G")
    p.add_argument("--six-punctured", action="store_true")
    p.add_argument("--ball", type=int, nargs=2, metavar=("G", "N"))
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("corr", parents=[common], help="psi-class intersection number")
    p.add_argument("g", type=int)
    p.add_argument("d", type=int, nargs="*")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("agk", parents=[common], help="normalized two-point correlators a_{g,k}")
    p.add_argument("g", type=int)
    p.set_defaults(func=cmd_agk)

    p = sub.add_parser("stats", parents=[common], help="square-tiled surface statistics")
    p.add_argument("g", type=int, nargs="?")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("--graph")
    p.add_argument("--moment", help="'e1/e2' or an exponent vector such as '1,-1'")
    p.add_argument("--heights", type=_int_list)
    p.add_argument("--normalized", action="store_true", help="moment of the normalized lengths")
    p.add_argument("--bound", type=int, help="probability that all heights are <= BOUND")
    p.add_argument("--height-one", action="store_true")
    p.set_defaults(func=cmd_stats)

    return parser


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _cache_path(args) -> Optional[str]:
    if args.no_cache:
        return None
    directory = args.cache_dir or os.environ.get(ENV_CACHE_DIR) or DEFAULT_CACHE_DIR
    return os.path.join(directory, CACHE_FILE_NAME)


def _configure_logging(verbosity: int) -> None:
    level = LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)]
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if args.workers is None:
        args.workers = _env_workers()
    elif args.workers < 1:
        parser.error("--workers must be >= 1")

    cache = _cache_path(args)
    if cache is not None:
        warm_from_cache(cache)

    try:
        result = args.func(args)
    except ConsistencyError as exc:
        print(f"quadvol: consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except DomainError as exc:
        print(f"quadvol: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        sys.stdout.write(RENDERERS[args.format](result, args.digits))

    if cache is not None:
        try:
            store_cache(cache)
        except OSError as exc:
            log.warning("could not write correlator cache %s: %s", cache, exc)
    return EXIT_OK
