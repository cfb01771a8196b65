from .contacts import ContactSelection, GroupAssignment, select_contact, split_groups
from .render import (
    EmailReport,
    parse_report_csv,
    render_report,
    write_outbox,
)
from .rounds import SendEvent, schedule_rounds
from .analysis import (
    AnalysisResult,
    RemediationStats,
    classify_cleanup,
    fit_logistic_glm,
    remediation_analysis,
    wald_p_value,
)

__all__ = [
    "ContactSelection", "GroupAssignment", "select_contact", "split_groups",
    "EmailReport", "parse_report_csv", "render_report", "write_outbox",
    "SendEvent", "schedule_rounds",
    "AnalysisResult", "RemediationStats", "classify_cleanup",
    "fit_logistic_glm", "remediation_analysis", "wald_p_value",
]
