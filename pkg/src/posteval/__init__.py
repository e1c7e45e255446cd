"""Post-editing evaluation of dialectal-Arabic to MSA machine translation.

The package covers the full workflow: corpus and annotation-sheet ingestion,
a guided decision-tree annotation protocol with adaptation gating, exact
segment error scoring (SEGS) with severity buckets, quadratic weighted kappa
agreement, rendered reports, a command-line interface, and an HTTP service.
"""

from .agreement import (
    AgreementTable,
    ConfusionMatrix,
    Dimension,
    MTCombine,
    agreement_table,
    band,
    confusion_matrix,
    qwk,
)
from .errors import PostevalError
from .model import (
    Annotation,
    AggregationMode,
    CategoryGroup,
    ErrorCategory,
    Project,
    ScoringConfig,
    Segment,
    Severity,
    SystemOutput,
    authoritative_annotations,
    gating_violations,
    validate_annotation,
)
from .protocol import (
    DecisionTree,
    ProtocolState,
    answer,
    default_tree,
    finalize,
    load_tree,
    replay,
    start_session,
    validate_tree,
)
from .reports import Report, build_report, render
from .scoring import (
    Bucket,
    bucket,
    category_totals,
    segment_scores,
    segs,
    severity_distribution,
)
from .sheets import export_sheet, import_corpus, import_sheet
from .store import load_project, save_project

__version__ = "0.1.0"

__all__ = [
    "AggregationMode",
    "AgreementTable",
    "Annotation",
    "Bucket",
    "CategoryGroup",
    "ConfusionMatrix",
    "DecisionTree",
    "Dimension",
    "ErrorCategory",
    "MTCombine",
    "PostevalError",
    "Project",
    "ProtocolState",
    "Report",
    "ScoringConfig",
    "Segment",
    "Severity",
    "SystemOutput",
    "agreement_table",
    "answer",
    "authoritative_annotations",
    "band",
    "bucket",
    "build_report",
    "category_totals",
    "confusion_matrix",
    "default_tree",
    "export_sheet",
    "finalize",
    "gating_violations",
    "import_corpus",
    "import_sheet",
    "load_project",
    "load_tree",
    "qwk",
    "render",
    "replay",
    "save_project",
    "segment_scores",
    "segs",
    "severity_distribution",
    "start_session",
    "validate_annotation",
    "validate_tree",
]
