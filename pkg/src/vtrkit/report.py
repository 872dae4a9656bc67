"""Report assembly and rendering (markdown, CSV, JSON).

Markdown and CSV cells use fixed precision: two decimals for table values,
three for p-values, with p below 0.001 shown as "<0.001".  JSON output always
carries full-precision numbers with separate fields for bracketed ratios.
All rendering is deterministic for a given dataset and flags.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from typing import Sequence

from .concordance import (
    AdjacentPairResult,
    ChiSquareResult,
    ContingencyTable,
    CorrelationResult,
    VARIABLES,
    adjacent_rating_probabilities,
    chi_square_independence,
    contingency_table,
    peer_bibliometric_spearman,
    spearman,
)
from .indicators import DisciplineProfile, RatingBreakdown, discipline_profile, rating_breakdown
from .model import Dataset, PipelineError, RATING_ORDER, validate_dataset
from .scoring import (
    DEFAULT_WEIGHTS,
    RankComparison,
    Ranking,
    RatingWeights,
    compile_ranking,
    rank_comparison,
    structure_ratings,
)

__all__ = [
    "round_half_up",
    "fmt",
    "fmt_pct",
    "fmt_p",
    "md_table",
    "csv_text",
    "json_text",
    "VARIABLE_LABELS",
    "profile_headers",
    "profile_row",
    "profile_dict",
    "breakdown_headers",
    "breakdown_row",
    "breakdown_dict",
    "contingency_rows",
    "contingency_dict",
    "chi_square_dict",
    "correlation_dict",
    "probability_headers",
    "probability_row",
    "probability_dict",
    "ranking_headers",
    "ranking_rows",
    "ranking_dict",
    "comparison_dict",
    "plot_data_text",
    "VariableBattery",
    "DisciplineSection",
    "ReportBundle",
    "battery_md",
    "build_battery",
    "build_section",
    "build_report",
    "render_report_md",
    "render_report_json",
    "render_report_csv",
]

VARIABLE_LABELS = {"citations": "article citations", "journal_if": "journal impact factor"}


def round_half_up(x: float, digits: int) -> float:
    quantum = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(x)).quantize(quantum, rounding=ROUND_HALF_UP))


def fmt(x: float | int | None, digits: int = 2) -> str:
    """Fixed-precision cell; absent values render as a dash."""
    if x is None:
        return "-"
    if isinstance(x, int):
        return str(x)
    return f"{round_half_up(x, digits):.{digits}f}"


def fmt_pct(x: float | None) -> str:
    """A fraction as a fixed two-decimal percentage."""
    if x is None:
        return "-"
    return f"{round_half_up(100.0 * x, 2):.2f}%"


def fmt_p(p: float | None) -> str:
    if p is None:
        return "-"
    if p < 0.001:
        return "<0.001"
    return f"{round_half_up(p, 3):.3f}"


def md_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join("---" for _ in headers) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


def csv_text(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return out.getvalue()


def json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# --- discipline profile (one row per area) ---

def profile_headers(flat: bool = False) -> list[str]:
    if flat:
        return [
            "discipline", "size", "coverage", "mean_authors", "mean_ownership",
            "peer_all", "peer_tr", "mean_citations", "cites_over_if", "mean_if", "h",
        ]
    return ["area", "size", "cov", "auth", "own", "peer (TR)", "cites (/IF)", "IF", "h"]


def profile_row(p: DisciplineProfile, flat: bool = False) -> list[str]:
    if flat:
        return [
            p.discipline, p.size, fmt(p.coverage, 4), fmt(p.mean_authors),
            fmt(p.mean_ownership, 4), fmt(p.peer_all, 3), fmt(p.peer_tr, 3),
            fmt(p.mean_citations), fmt(p.cites_over_if), fmt(p.mean_if), p.h,
        ]
    return [
        p.discipline,
        str(p.size),
        fmt_pct(p.coverage),
        fmt(p.mean_authors),
        fmt_pct(p.mean_ownership),
        f"{fmt(p.peer_all)} ({fmt(p.peer_tr)})",
        f"{fmt(p.mean_citations)} ({fmt(p.cites_over_if)})",
        fmt(p.mean_if),
        str(p.h),
    ]


def profile_dict(p: DisciplineProfile) -> dict:
    return {
        "discipline": p.discipline,
        "size": p.size,
        "coverage": p.coverage,
        "mean_authors": p.mean_authors,
        "mean_ownership": p.mean_ownership,
        "peer_all": p.peer_all,
        "peer_tr": p.peer_tr,
        "mean_citations": p.mean_citations,
        "cites_over_if": p.cites_over_if,
        "mean_if": p.mean_if,
        "h": p.h,
    }


# --- rating breakdown (four rows per area) ---

def breakdown_headers(flat: bool = False) -> list[str]:
    if flat:
        return [
            "rating", "count", "share", "mean_citations", "citations_ratio",
            "mean_if", "if_ratio", "h", "h_ratio",
        ]
    return ["rating", "size", "cites", "IF", "h"]


def breakdown_row(b: RatingBreakdown, flat: bool = False) -> list[str]:
    if flat:
        return [
            b.rating.token, b.count, fmt(b.share, 4), fmt(b.mean_citations),
            fmt(b.citations_ratio), fmt(b.mean_if), fmt(b.if_ratio),
            "-" if b.h is None else b.h, fmt(b.h_ratio),
        ]
    return [
        b.rating.token,
        f"{b.count} ({fmt_pct(b.share)})",
        f"{fmt(b.mean_citations)} ({fmt(b.citations_ratio)})",
        f"{fmt(b.mean_if)} ({fmt(b.if_ratio)})",
        f"{'-' if b.h is None else b.h} ({fmt(b.h_ratio)})",
    ]


def breakdown_dict(b: RatingBreakdown) -> dict:
    return {
        "rating": b.rating.token,
        "count": b.count,
        "share": b.share,
        "mean_citations": b.mean_citations,
        "citations_ratio": b.citations_ratio,
        "mean_if": b.mean_if,
        "if_ratio": b.if_ratio,
        "h": b.h,
        "h_ratio": b.h_ratio,
    }


# --- concordance battery ---

def contingency_rows(table: ContingencyTable) -> list[list[str]]:
    rows = []
    for rating, pcts in zip(RATING_ORDER, table.row_percentages):
        rows.append([rating.token] + [fmt(v) for v in pcts])
    return rows


def contingency_dict(table: ContingencyTable) -> dict:
    return {
        "variable": table.variable,
        "cutpoints": list(table.bins.cutpoints),
        "degenerate_bins": table.bins.degenerate,
        "ratings": [r.token for r in RATING_ORDER],
        "counts": [list(row) for row in table.counts],
        "row_percentages": [list(row) for row in table.row_percentages],
    }


def chi_square_dict(result: ChiSquareResult) -> dict:
    return {
        "statistic": result.statistic,
        "df": result.df,
        "p_value": result.p_value,
        "low_expected": result.low_expected,
    }


def correlation_dict(result: CorrelationResult) -> dict:
    return {
        "coefficient": result.coefficient,
        "p_value": result.p_value,
        "n": result.n,
        "method": result.method,
    }


def probability_headers() -> list[str]:
    return ["ratings", "P(>)", "P(<)", "P(=)", "pairs"]


def probability_row(pair: AdjacentPairResult) -> list[str]:
    if pair.triple is None:
        return [pair.label, "-", "-", "-", pair.note or "-"]
    pg, pl, pe = pair.triple.as_floats()
    return [pair.label, fmt(pg), fmt(pl), fmt(pe), str(pair.triple.pair_count)]


def probability_dict(pair: AdjacentPairResult) -> dict:
    payload: dict = {"pair": pair.label, "note": pair.note}
    if pair.triple is not None:
        pg, pl, pe = pair.triple.as_floats()
        payload.update(
            {"p_greater": pg, "p_less": pl, "p_equal": pe, "pair_count": pair.triple.pair_count}
        )
    return payload


# --- rankings ---

def ranking_headers() -> list[str]:
    return ["rank", "structure", "score", "n_products", "size_class"]


def ranking_rows(r: Ranking) -> list[list[str]]:
    return [
        [str(e.display_rank), e.structure_id, fmt(e.score), str(e.n_products), e.size_class.value]
        for e in r.entries
    ]


def ranking_dict(r: Ranking) -> dict:
    return {
        "discipline": r.discipline,
        "metric": r.metric,
        "min_products": r.min_products,
        "excluded": list(r.excluded),
        "entries": [
            {
                "structure_id": e.structure_id,
                "score": e.score,
                "display_rank": e.display_rank,
                "average_rank": e.average_rank,
                "n_products": e.n_products,
                "size_class": e.size_class.value,
            }
            for e in r.entries
        ],
    }


def comparison_dict(c: RankComparison) -> dict:
    return {
        "metric_a": c.metric_a,
        "metric_b": c.metric_b,
        "median_abs_delta": c.median_abs_delta,
        "median_fraction": c.median_fraction,
        "favored_by_a": list(c.favored_by_a),
        "favored_by_b": list(c.favored_by_b),
        "unchanged": list(c.unchanged),
        "dropped": list(c.dropped),
        "entries": [
            {
                "structure_id": e.structure_id,
                "rank_a": e.rank_a,
                "rank_b": e.rank_b,
                "delta": e.delta,
            }
            for e in c.entries
        ],
    }


def plot_data_text(c: RankComparison) -> str:
    """Rank pairs as a small CSV for external plotting."""
    rows = [(e.rank_a, e.rank_b) for e in c.entries]
    return csv_text([f"{c.metric_a}_rank", f"{c.metric_b}_rank"], rows)


# --- full report bundle ---

@dataclass
class VariableBattery:
    variable: str
    table: ContingencyTable | None = None
    chi_square: ChiSquareResult | None = None
    product_spearman: CorrelationResult | None = None
    probabilities: list[AdjacentPairResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class DisciplineSection:
    profile: DisciplineProfile
    breakdown: list[RatingBreakdown]
    batteries: list[VariableBattery]
    ranking: Ranking | None
    ranking_note: str | None
    structure_correlations: list[tuple[str, CorrelationResult | None, str | None]]
    comparison: RankComparison | None
    comparison_note: str | None


@dataclass
class ReportBundle:
    source_name: str
    source_digest: str
    validation_notes: list[str]
    sections: dict[str, DisciplineSection]


def build_battery(products, variable: str, coding: str = "quartile") -> VariableBattery:
    battery = VariableBattery(variable=variable)
    try:
        battery.table = contingency_table(products, variable)
    except PipelineError as exc:
        battery.notes.append(f"{exc.code}: {exc}")
        return battery
    try:
        battery.chi_square = chi_square_independence(battery.table.counts)
    except PipelineError as exc:
        battery.notes.append(f"{exc.code}: {exc}")
    try:
        battery.product_spearman = peer_bibliometric_spearman(products, variable, coding)
    except PipelineError as exc:
        battery.notes.append(f"{exc.code}: {exc}")
    battery.probabilities = adjacent_rating_probabilities(products, variable)
    return battery


def _structure_correlations(
    ratings, min_products: int
) -> list[tuple[str, CorrelationResult | None, str | None]]:
    """Structure-level Spearman of peer rating (TR articles) against the two
    bibliometric ratings, over structures clearing the product threshold."""
    eligible = [r for r in ratings if r.n_products >= min_products]
    out = []
    for label, attr in (("peer_tr~cites", "cites"), ("peer_tr~impact", "impact")):
        pairs = [
            (r.peer_tr, getattr(r, attr))
            for r in eligible
            if r.peer_tr is not None and getattr(r, attr) is not None
        ]
        try:
            result = spearman([p for p, _ in pairs], [q for _, q in pairs])
            out.append((label, result, None))
        except PipelineError as exc:
            out.append((label, None, f"{exc.code}: {exc}"))
    return out


def build_section(
    dataset: Dataset,
    discipline: str,
    weights: RatingWeights = DEFAULT_WEIGHTS,
    min_products: int = 10,
    coding: str = "quartile",
) -> DisciplineSection:
    products = dataset.products_in(discipline)
    ratings = structure_ratings(dataset, discipline, weights)
    ranking = None
    ranking_note = None
    comparison = None
    comparison_note = None
    try:
        ranking = compile_ranking(ratings, "peer_tr", min_products)
    except PipelineError as exc:
        ranking_note = f"{exc.code}: {exc}"
    if ranking is not None:
        try:
            comparison = rank_comparison(ranking, compile_ranking(ratings, "cites", min_products))
        except PipelineError as exc:
            comparison_note = f"{exc.code}: {exc}"
    return DisciplineSection(
        profile=discipline_profile(dataset, discipline, weights),
        breakdown=rating_breakdown(dataset, discipline, weights),
        batteries=[build_battery(products, variable, coding) for variable in VARIABLES],
        ranking=ranking,
        ranking_note=ranking_note,
        structure_correlations=_structure_correlations(ratings, min_products),
        comparison=comparison,
        comparison_note=comparison_note,
    )


def build_report(
    dataset: Dataset,
    disciplines: Sequence[str] | None = None,
    weights: RatingWeights = DEFAULT_WEIGHTS,
    min_products: int = 10,
    coding: str = "quartile",
) -> ReportBundle:
    chosen = list(disciplines) if disciplines else list(dataset.disciplines)
    validation = validate_dataset(dataset)
    notes = [f"{i.rule}: {i.message}" for i in validation.errors + validation.warnings]
    sections = {
        d: build_section(dataset, d, weights, min_products, coding) for d in sorted(chosen)
    }
    return ReportBundle(
        source_name=dataset.provenance.source_name,
        source_digest=dataset.provenance.source_digest,
        validation_notes=notes,
        sections=sections,
    )


def battery_md(battery: VariableBattery) -> list[str]:
    label = VARIABLE_LABELS[battery.variable]
    parts = [f"### Concordance: {label}\n"]
    for note in battery.notes:
        parts.append(f"- note: {note}\n")
    if battery.table is not None:
        parts.append("Conditional distribution of the quartile-coded variable given peer rating (row %):\n")
        parts.append(md_table(["rating", "Q1", "Q2", "Q3", "Q4"], contingency_rows(battery.table)))
        if battery.table.bins.degenerate:
            parts.append("- note: quartile cutpoints coincide (heavy ties)\n")
    if battery.chi_square is not None:
        c = battery.chi_square
        flag = " (low expected counts)" if c.low_expected else ""
        parts.append(
            f"Pearson chi-square independence: statistic = {fmt(c.statistic)}, "
            f"df = {c.df}, p = {fmt_p(c.p_value)}{flag}\n"
        )
    if battery.product_spearman is not None:
        s = battery.product_spearman
        parts.append(
            f"Product-level Spearman (peer vs {label}): "
            f"sigma = {fmt(s.coefficient)}, p = {fmt_p(s.p_value)}, n = {s.n}\n"
        )
    if battery.probabilities:
        parts.append("Adjacent-rating pairwise probabilities:\n")
        parts.append(
            md_table(probability_headers(), [probability_row(p) for p in battery.probabilities])
        )
    return parts


def render_report_md(bundle: ReportBundle) -> str:
    parts = ["# Assessment analysis report\n"]
    parts.append(f"- source: {bundle.source_name}\n- digest: {bundle.source_digest}\n")
    parts.append("\n## Validation\n")
    if bundle.validation_notes:
        parts.extend(f"- {note}\n" for note in bundle.validation_notes)
    else:
        parts.append("- no issues\n")
    for discipline, section in bundle.sections.items():
        parts.append(f"\n## Discipline {discipline}\n")
        parts.append("### Profile\n")
        parts.append(md_table(profile_headers(), [profile_row(section.profile)]))
        parts.append("### Peer rating breakdown\n")
        parts.append(md_table(breakdown_headers(), [breakdown_row(b) for b in section.breakdown]))
        for battery in section.batteries:
            parts.extend(battery_md(battery))
        parts.append("### Structure ranking (peer rating over TR articles)\n")
        if section.ranking is not None:
            parts.append(md_table(ranking_headers(), ranking_rows(section.ranking)))
            if section.ranking.excluded:
                parts.append(f"- excluded (no TR articles): {', '.join(section.ranking.excluded)}\n")
        elif section.ranking_note:
            parts.append(f"- note: {section.ranking_note}\n")
        parts.append("### Structure-level rank correlations\n")
        rows = []
        for label, result, note in section.structure_correlations:
            if result is None:
                rows.append([label, "-", "-", note or "-"])
            else:
                rows.append([label, fmt(result.coefficient), fmt_p(result.p_value), str(result.n)])
        parts.append(md_table(["pair", "sigma", "p", "n"], rows))
        if section.comparison is not None:
            c = section.comparison
            parts.append("### Rank comparison (peer vs citation compilation)\n")
            parts.append(
                md_table(
                    ["structure", f"{c.metric_a} rank", f"{c.metric_b} rank", "delta"],
                    [
                        [e.structure_id, fmt(e.rank_a, 1), fmt(e.rank_b, 1), fmt(e.delta, 1)]
                        for e in c.entries
                    ],
                )
            )
            parts.append(
                f"- median |delta| = {fmt(c.median_abs_delta, 1)} "
                f"({fmt_pct(c.median_fraction)} of the compilation length)\n"
            )
            if c.favored_by_a:
                parts.append(f"- most favored by {c.metric_a}: {', '.join(c.favored_by_a[:4])}\n")
            if c.favored_by_b:
                parts.append(f"- most favored by {c.metric_b}: {', '.join(c.favored_by_b[:4])}\n")
            if c.unchanged:
                parts.append(f"- unchanged positions: {', '.join(c.unchanged)}\n")
        elif section.comparison_note:
            parts.append(f"- note: {section.comparison_note}\n")
    return "".join(parts)


def _section_json(section: DisciplineSection) -> dict:
    return {
        "profile": profile_dict(section.profile),
        "breakdown": [breakdown_dict(b) for b in section.breakdown],
        "batteries": [
            {
                "variable": b.variable,
                "contingency": None if b.table is None else contingency_dict(b.table),
                "chi_square": None if b.chi_square is None else chi_square_dict(b.chi_square),
                "product_spearman": (
                    None if b.product_spearman is None else correlation_dict(b.product_spearman)
                ),
                "probabilities": [probability_dict(p) for p in b.probabilities],
                "notes": b.notes,
            }
            for b in section.batteries
        ],
        "ranking": None if section.ranking is None else ranking_dict(section.ranking),
        "ranking_note": section.ranking_note,
        "structure_correlations": [
            {
                "pair": label,
                "result": None if result is None else correlation_dict(result),
                "note": note,
            }
            for label, result, note in section.structure_correlations
        ],
        "comparison": None if section.comparison is None else comparison_dict(section.comparison),
        "comparison_note": section.comparison_note,
    }


def render_report_json(bundle: ReportBundle) -> str:
    return json_text(
        {
            "source_name": bundle.source_name,
            "source_digest": bundle.source_digest,
            "validation_notes": bundle.validation_notes,
            "disciplines": {d: _section_json(s) for d, s in bundle.sections.items()},
        }
    )


def render_report_csv(bundle: ReportBundle) -> str:
    """CSV rendering: flat sections separated by '# <name>' marker lines."""
    parts = []
    parts.append("# profiles\n")
    parts.append(
        csv_text(
            profile_headers(flat=True),
            [profile_row(s.profile, flat=True) for s in bundle.sections.values()],
        )
    )
    parts.append("# breakdowns\n")
    rows = []
    for discipline, section in bundle.sections.items():
        for b in section.breakdown:
            rows.append([discipline] + breakdown_row(b, flat=True))
    parts.append(csv_text(["discipline"] + breakdown_headers(flat=True), rows))
    parts.append("# contingency_row_percentages\n")
    rows = []
    for discipline, section in bundle.sections.items():
        for battery in section.batteries:
            if battery.table is None:
                continue
            for rating, pcts in zip(RATING_ORDER, battery.table.row_percentages):
                rows.append([discipline, battery.variable, rating.token] + [fmt(v) for v in pcts])
    parts.append(csv_text(["discipline", "variable", "rating", "q1", "q2", "q3", "q4"], rows))
    parts.append("# chi_square\n")
    rows = []
    for discipline, section in bundle.sections.items():
        for battery in section.batteries:
            if battery.chi_square is None:
                continue
            c = battery.chi_square
            rows.append(
                [discipline, battery.variable, fmt(c.statistic), c.df, fmt_p(c.p_value), c.low_expected]
            )
    parts.append(csv_text(["discipline", "variable", "statistic", "df", "p_value", "low_expected"], rows))
    parts.append("# probabilities\n")
    rows = []
    for discipline, section in bundle.sections.items():
        for battery in section.batteries:
            for pair in battery.probabilities:
                rows.append([discipline, battery.variable] + probability_row(pair))
    parts.append(csv_text(["discipline", "variable", "pair", "p_greater", "p_less", "p_equal", "pairs"], rows))
    parts.append("# rankings\n")
    rows = []
    for discipline, section in bundle.sections.items():
        if section.ranking is None:
            continue
        for entry_row in ranking_rows(section.ranking):
            rows.append([discipline, section.ranking.metric] + entry_row)
    parts.append(csv_text(["discipline", "metric"] + ranking_headers(), rows))
    return "".join(parts)
