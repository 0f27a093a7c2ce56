"""Contest analytics: the recruit-activity table, significance tests, summaries."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import FINALIST_RANK, WINNER_RANK, Kind, ReferralGraph
from .stats import (
    ContingencyTable2x2,
    DegenerateTableError,
    fisher_exact_two_sided,
    pearson_chi2,
    survey_chi2,
)

TABLE1_ROWS = ("snp_recruits", "direct", "indirect", "other_members", "total")
TABLE1_COLS = ("users", "proposal_authors", "finalists", "winners")

ROW_LABELS = {
    "snp_recruits": "Contest new member recruits",
    "direct": "  directly recruited",
    "indirect": "  indirectly recruited",
    "other_members": "Other members",
    "total": "TOTAL members",
}


@dataclass(frozen=True)
class Table1Report:
    rows: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        return {"rows": {r: dict(self.rows[r]) for r in TABLE1_ROWS}}

    def to_text(self) -> str:
        headers = ["", "Users", "Proposal Authors", "Finalists", "Winners"]
        lines = [headers]
        for row in TABLE1_ROWS:
            cells = self.rows[row]
            lines.append([ROW_LABELS[row]] + [str(cells[c]) for c in TABLE1_COLS])
        widths = [max(len(line[i]) for line in lines) for i in range(len(headers))]
        out = []
        for line in lines:
            out.append(
                line[0].ljust(widths[0])
                + "  "
                + "  ".join(v.rjust(widths[i + 1]) for i, v in enumerate(line[1:]))
            )
        return "\n".join(out)


def build_table1(graph: ReferralGraph) -> Table1Report:
    """Cross-tabulate members by recruitment route and proposal activity.

    A member counts once per column regardless of proposal count; the
    finalist and winner columns count members with any proposal that
    reached the stage.
    """
    zero = {c: 0 for c in TABLE1_COLS}
    rows = {r: dict(zero) for r in TABLE1_ROWS}

    for p in graph.members():
        c = graph.classify(p.id)
        if c.kind is Kind.DIRECT_RECRUIT:
            buckets = ("snp_recruits", "direct", "total")
        elif c.kind is Kind.INDIRECT_RECRUIT:
            buckets = ("snp_recruits", "indirect", "total")
        else:
            buckets = ("other_members", "total")

        cols = ["users"]
        proposals = graph.member_proposals.get(p.member_id, ())
        if proposals:
            cols.append("proposal_authors")
            best = max(graph.proposals[pid].best_rank for pid in proposals)
            if best >= FINALIST_RANK:
                cols.append("finalists")
            if best >= WINNER_RANK:
                cols.append("winners")
        for row in buckets:
            for col in cols:
                rows[row][col] += 1
    return Table1Report(rows=rows)


def reconstruct_survey_counts(
    total_respondents: int = 2607,
    overall_outside_share: float = 0.54,
    recruit_respondents: int = 55,
    recruit_outside_share: float = 0.80,
) -> dict[str, tuple[int, int]]:
    """Rebuild the survey 2x2 inputs from the published shares.

    The overall outside-the-US share is applied to all respondents, then
    the recruit group's hits are carved out of it. Adjustable because the
    published percentages are rounded.
    """
    recruit_hits = round(recruit_outside_share * recruit_respondents)
    overall_hits = round(overall_outside_share * total_respondents)
    others = total_respondents - recruit_respondents
    other_hits = overall_hits - recruit_hits
    return {"recruits": (recruit_hits, recruit_respondents), "others": (other_hits, others)}


def _result_or_error(fn) -> dict:
    try:
        return fn().to_dict()
    except (DegenerateTableError, ValueError) as exc:
        return {"error": str(exc)}


def tests_report(graph: ReferralGraph) -> dict:
    """The significance tests, recomputed from the current table counts."""
    t1 = build_table1(graph).rows
    snp, other = t1["snp_recruits"], t1["other_members"]
    direct, indirect = t1["direct"], t1["indirect"]

    def table(g1: dict, g2: dict, outcome: str, base: str) -> tuple[int, int, int, int]:
        return (
            g1[outcome],
            g1[base] - g1[outcome],
            g2[outcome],
            g2[base] - g2[outcome],
        )

    report = {
        "authorship_chi2": _result_or_error(
            lambda: pearson_chi2(
                ContingencyTable2x2(*table(snp, other, "proposal_authors", "users"))
            )
        ),
        "finalist_chi2": _result_or_error(
            lambda: pearson_chi2(
                ContingencyTable2x2(*table(snp, other, "finalists", "users"))
            )
        ),
        "conditional_finalist_chi2": _result_or_error(
            lambda: pearson_chi2(
                ContingencyTable2x2(*table(snp, other, "finalists", "proposal_authors"))
            )
        ),
        "fisher_direct_vs_indirect_authors": _result_or_error(
            lambda: fisher_exact_two_sided(
                ContingencyTable2x2(*table(direct, indirect, "proposal_authors", "users"))
            )
        ),
        "fisher_finalists_among_authors": _result_or_error(
            lambda: fisher_exact_two_sided(
                ContingencyTable2x2(*table(direct, indirect, "finalists", "proposal_authors"))
            )
        ),
    }
    survey = reconstruct_survey_counts()
    report["survey_outside_us_chi2"] = _result_or_error(
        lambda: survey_chi2(survey["recruits"], survey["others"])
    )
    report["survey_outside_us_chi2"]["source"] = "survey_reconstruction"
    return report


def summary_report(graph: ReferralGraph) -> dict:
    counts = graph.network_counts()
    counts["members"] = sum(1 for _ in graph.members())
    counts["participants"] = len(graph.participants)
    counts["proposals"] = len(graph.proposals)
    counts["events"] = graph.last_seq
    return counts
