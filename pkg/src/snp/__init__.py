"""Referral-contest engine with recursive chain payouts and contest analytics."""

from .analytics import Table1Report, build_table1, summary_report, tests_report
from .events import EventLog, EventRecord, ReplayError, replay, state_hash
from .exports import export_graph
from .graph import (
    STAFF_ROOT_ID,
    Classification,
    ClickOutcome,
    Kind,
    Participant,
    ReferralEdge,
    ReferralGraph,
    ReferralToken,
)
from .payouts import (
    PayoutLedger,
    PayoutSchedule,
    chain_reward,
    compute_payouts,
    ledger_bound_check,
)
from .simulate import (
    CascadeResult,
    GraphSpec,
    IncentiveModel,
    ProposalModel,
    compare_incentives,
    emitted_log_validates,
    generate_graph,
    simulate,
)
from .stats import (
    ContingencyTable2x2,
    TestResult,
    chi2_sf,
    fisher_exact_two_sided,
    hypergeom_pmf,
    pearson_chi2,
    survey_chi2,
)

__version__ = "0.1.0"

__all__ = [
    "STAFF_ROOT_ID",
    "CascadeResult",
    "Classification",
    "ClickOutcome",
    "ContingencyTable2x2",
    "EventLog",
    "EventRecord",
    "GraphSpec",
    "IncentiveModel",
    "Kind",
    "Participant",
    "PayoutLedger",
    "PayoutSchedule",
    "ProposalModel",
    "ReferralEdge",
    "ReferralGraph",
    "ReferralToken",
    "ReplayError",
    "Table1Report",
    "TestResult",
    "build_table1",
    "chain_reward",
    "chi2_sf",
    "compare_incentives",
    "compute_payouts",
    "emitted_log_validates",
    "export_graph",
    "fisher_exact_two_sided",
    "generate_graph",
    "hypergeom_pmf",
    "ledger_bound_check",
    "pearson_chi2",
    "replay",
    "simulate",
    "state_hash",
    "summary_report",
    "survey_chi2",
    "tests_report",
]
