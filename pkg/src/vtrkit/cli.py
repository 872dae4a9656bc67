"""Command-line front end.

Subcommands: ingest, validate, profile, breakdown, rank, compare-ranks,
concordance, probability, synth, report.  Exit codes: 0 success, 1 validation
or pipeline errors, 2 usage errors.  Every failure prints a machine-readable
JSON error record to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import report as rpt
from .concordance import adjacent_rating_probabilities
from .indicators import discipline_profile, rating_breakdown
from .model import (
    IngestConfig,
    PipelineError,
    SelectionPolicy,
    ValidationReport,
    load_archive,
    parse_products_file,
    parse_staff,
    serialize_products,
    validate_dataset,
    write_archive,
)
from .scoring import compile_ranking, rank_comparison, structure_ratings
from .synth import SynthConfig, generate_exercise, load_synth_config

VARIABLE_BY_FLAG = {"cites": "citations", "if": "journal_if"}
METRIC_BY_FLAG = {"peer": "peer_all", "peer-tr": "peer_tr", "cites": "cites", "if": "impact"}


def _write_out(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _load_dataset(path: str):
    with open(path, "r", encoding="utf-8") as f:
        return load_archive(f.read())


def _report_to_stderr(report: ValidationReport) -> None:
    if report.errors or report.warnings:
        sys.stderr.write(json.dumps(report.as_dict(), sort_keys=True) + "\n")


def _render_validation(report: ValidationReport, fmt: str) -> str:
    if fmt == "json":
        return rpt.json_text(report.as_dict())
    headers = ["kind", "row", "rule", "message"]
    rows = [["error", i.row, i.rule, i.message] for i in report.errors]
    rows += [["warning", i.row, i.rule, i.message] for i in report.warnings]
    if fmt == "csv":
        return rpt.csv_text(headers, rows)
    lines = [f"accepted products: {report.accepted_count}\n"]
    if rows:
        lines.append(rpt.md_table(headers, [[str(c) for c in r] for r in rows]))
    else:
        lines.append("no issues\n")
    return "".join(lines)


def cmd_ingest(args) -> int:
    config = IngestConfig(source_name=args.products)
    dataset, report = parse_products_file(args.products, config)
    _report_to_stderr(report)
    if dataset is None:
        return 1
    _write_out(write_archive(dataset), args.out)
    return 0


def cmd_validate(args) -> int:
    dataset = _load_dataset(args.dataset)
    staff = None
    if args.staff:
        with open(args.staff, "r", encoding="utf-8") as f:
            staff = parse_staff(f.read())
    policy = SelectionPolicy(staff=staff, cap_fraction=args.cap)
    report = validate_dataset(dataset, policy)
    _write_out(_render_validation(report, args.format), args.out)
    return 0 if report.ok else 1


def cmd_profile(args) -> int:
    dataset = _load_dataset(args.dataset)
    disciplines = [args.discipline] if args.discipline else list(dataset.disciplines)
    profiles = [discipline_profile(dataset, d) for d in disciplines]
    if args.format == "json":
        text = rpt.json_text([rpt.profile_dict(p) for p in profiles])
    elif args.format == "csv":
        text = rpt.csv_text(rpt.profile_headers(flat=True), [rpt.profile_row(p, flat=True) for p in profiles])
    else:
        text = rpt.md_table(rpt.profile_headers(), [rpt.profile_row(p) for p in profiles])
    _write_out(text, args.out)
    return 0


def cmd_breakdown(args) -> int:
    dataset = _load_dataset(args.dataset)
    rows = rating_breakdown(dataset, args.discipline)
    if args.format == "json":
        text = rpt.json_text([rpt.breakdown_dict(b) for b in rows])
    elif args.format == "csv":
        text = rpt.csv_text(rpt.breakdown_headers(flat=True), [rpt.breakdown_row(b, flat=True) for b in rows])
    else:
        text = rpt.md_table(rpt.breakdown_headers(), [rpt.breakdown_row(b) for b in rows])
    _write_out(text, args.out)
    return 0


def cmd_rank(args) -> int:
    dataset = _load_dataset(args.dataset)
    ratings = structure_ratings(dataset, args.discipline)
    ranking = compile_ranking(ratings, METRIC_BY_FLAG[args.metric], args.min_products)
    if args.format == "json":
        text = rpt.json_text(rpt.ranking_dict(ranking))
    elif args.format == "csv":
        text = rpt.csv_text(rpt.ranking_headers(), rpt.ranking_rows(ranking))
    else:
        text = rpt.md_table(rpt.ranking_headers(), rpt.ranking_rows(ranking))
        if ranking.excluded:
            text += f"- excluded (no TR articles): {', '.join(ranking.excluded)}\n"
    _write_out(text, args.out)
    return 0


def cmd_compare_ranks(args) -> int:
    dataset = _load_dataset(args.dataset)
    ratings = structure_ratings(dataset, args.discipline)
    ranking_a = compile_ranking(ratings, METRIC_BY_FLAG[args.metric], args.min_products)
    ranking_b = compile_ranking(ratings, METRIC_BY_FLAG[args.against], args.min_products)
    comparison = rank_comparison(ranking_a, ranking_b)
    if args.plot_data:
        _write_out(rpt.plot_data_text(comparison), args.plot_data)
    if args.format == "json":
        text = rpt.json_text(rpt.comparison_dict(comparison))
    elif args.format == "csv":
        text = rpt.csv_text(
            ["structure_id", "rank_a", "rank_b", "delta"],
            [[e.structure_id, e.rank_a, e.rank_b, e.delta] for e in comparison.entries],
        )
    else:
        lines = [
            rpt.md_table(
                ["structure", f"{comparison.metric_a} rank", f"{comparison.metric_b} rank", "delta"],
                [
                    [e.structure_id, rpt.fmt(e.rank_a, 1), rpt.fmt(e.rank_b, 1), rpt.fmt(e.delta, 1)]
                    for e in comparison.entries
                ],
            ),
            f"- median |delta| = {rpt.fmt(comparison.median_abs_delta, 1)} "
            f"({rpt.fmt_pct(comparison.median_fraction)} of the compilation length)\n",
        ]
        if comparison.dropped:
            lines.append(f"- present in only one ranking: {', '.join(comparison.dropped)}\n")
        text = "".join(lines)
    _write_out(text, args.out)
    return 0


def cmd_concordance(args) -> int:
    dataset = _load_dataset(args.dataset)
    products = dataset.products_in(args.discipline)
    if not products:
        raise PipelineError("empty_discipline", f"no products for discipline {args.discipline!r}")
    battery = rpt.build_battery(products, VARIABLE_BY_FLAG[args.variable], args.coding)
    if args.format == "json":
        text = rpt.json_text(
            {
                "discipline": args.discipline,
                "variable": battery.variable,
                "contingency": None if battery.table is None else rpt.contingency_dict(battery.table),
                "chi_square": None if battery.chi_square is None else rpt.chi_square_dict(battery.chi_square),
                "product_spearman": (
                    None
                    if battery.product_spearman is None
                    else rpt.correlation_dict(battery.product_spearman)
                ),
                "probabilities": [rpt.probability_dict(p) for p in battery.probabilities],
                "notes": battery.notes,
            }
        )
    elif args.format == "csv":
        parts = []
        if battery.table is not None:
            parts.append("# contingency_row_percentages\n")
            parts.append(rpt.csv_text(["rating", "q1", "q2", "q3", "q4"], rpt.contingency_rows(battery.table)))
        if battery.chi_square is not None:
            c = battery.chi_square
            parts.append("# chi_square\n")
            parts.append(
                rpt.csv_text(
                    ["statistic", "df", "p_value", "low_expected"],
                    [[rpt.fmt(c.statistic), c.df, rpt.fmt_p(c.p_value), c.low_expected]],
                )
            )
        if battery.product_spearman is not None:
            s = battery.product_spearman
            parts.append("# product_spearman\n")
            parts.append(
                rpt.csv_text(["coefficient", "p_value", "n"], [[rpt.fmt(s.coefficient), rpt.fmt_p(s.p_value), s.n]])
            )
        parts.append("# probabilities\n")
        parts.append(
            rpt.csv_text(
                ["pair", "p_greater", "p_less", "p_equal", "pairs"],
                [rpt.probability_row(p) for p in battery.probabilities],
            )
        )
        text = "".join(parts)
    else:
        text = "".join(rpt.battery_md(battery))
    _write_out(text, args.out)
    return 0


def cmd_probability(args) -> int:
    dataset = _load_dataset(args.dataset)
    products = dataset.products_in(args.discipline)
    if not products:
        raise PipelineError("empty_discipline", f"no products for discipline {args.discipline!r}")
    pairs = adjacent_rating_probabilities(products, VARIABLE_BY_FLAG[args.variable])
    if args.format == "json":
        text = rpt.json_text([rpt.probability_dict(p) for p in pairs])
    elif args.format == "csv":
        text = rpt.csv_text(
            ["pair", "p_greater", "p_less", "p_equal", "pairs"], [rpt.probability_row(p) for p in pairs]
        )
    else:
        text = rpt.md_table(rpt.probability_headers(), [rpt.probability_row(p) for p in pairs])
    _write_out(text, args.out)
    return 0


def cmd_synth(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            config = load_synth_config(f.read())
    else:
        config = SynthConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    dataset = generate_exercise(config)
    _write_out(serialize_products(dataset), args.out)
    return 0


def cmd_report(args) -> int:
    dataset = _load_dataset(args.dataset)
    disciplines = None if args.all or not args.discipline else [args.discipline]
    bundle = rpt.build_report(dataset, disciplines, min_products=args.min_products, coding=args.coding)
    if args.format == "json":
        text = rpt.render_report_json(bundle)
    elif args.format == "csv":
        text = rpt.render_report_csv(bundle)
    else:
        text = rpt.render_report_md(bundle)
    _write_out(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtrkit",
        description="Research-assessment analytics: peer ratings, bibliometric indicators, concordance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dataset=True, fmt=True):
        if dataset:
            p.add_argument("--dataset", required=True, help="canonical dataset archive (JSON)")
        if fmt:
            p.add_argument("--format", choices=("md", "csv", "json"), default="md")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("ingest", help="parse a products file and write the canonical archive")
    p.add_argument("--products", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="re-check invariants and audit submission caps")
    common(p)
    p.add_argument("--staff", default=None, help="optional staff table (structure_id,kind,avg_staff)")
    p.add_argument("--cap", type=float, default=0.5, help="cap as a fraction of FTE researchers")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("profile", help="discipline profile rows")
    common(p)
    p.add_argument("--discipline", default=None, help="one area (default: all)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("breakdown", help="per-rating breakdown for one discipline")
    common(p)
    p.add_argument("--discipline", required=True)
    p.set_defaults(func=cmd_breakdown)

    p = sub.add_parser("rank", help="structure ranking for one discipline")
    common(p)
    p.add_argument("--discipline", required=True)
    p.add_argument("--metric", choices=sorted(METRIC_BY_FLAG), default="peer-tr")
    p.add_argument("--min-products", type=int, default=10)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("compare-ranks", help="compare two structure rankings")
    common(p)
    p.add_argument("--discipline", required=True)
    p.add_argument("--metric", choices=sorted(METRIC_BY_FLAG), default="peer-tr")
    p.add_argument("--against", choices=sorted(METRIC_BY_FLAG), default="cites")
    p.add_argument("--min-products", type=int, default=10)
    p.add_argument("--plot-data", default=None, help="write (rank, rank) pairs to this CSV path")
    p.set_defaults(func=cmd_compare_ranks)

    p = sub.add_parser("concordance", help="contingency + chi-square + Spearman + probabilities")
    common(p)
    p.add_argument("--discipline", required=True)
    p.add_argument("--variable", choices=sorted(VARIABLE_BY_FLAG), default="cites")
    p.add_argument("--coding", choices=("quartile", "raw"), default="quartile")
    p.set_defaults(func=cmd_concordance)

    p = sub.add_parser("probability", help="adjacent-rating pairwise probabilities")
    common(p)
    p.add_argument("--discipline", required=True)
    p.add_argument("--variable", choices=sorted(VARIABLE_BY_FLAG), default="cites")
    p.set_defaults(func=cmd_probability)

    p = sub.add_parser("synth", help="generate a synthetic exercise in the products file format")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON generator config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="full analysis report")
    common(p)
    p.add_argument("--discipline", default=None)
    p.add_argument("--all", action="store_true", help="cover every discipline present")
    p.add_argument("--min-products", type=int, default=10)
    p.add_argument("--coding", choices=("quartile", "raw"), default="quartile")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}, sort_keys=True) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "message": str(exc)}, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
