"""Inter-annotator agreement: confusion matrices and quadratic weighted kappa.

Kappa follows the standard quadratic-weight formulation over a k-level
ordinal scale: kappa = 1 - sum(w*O) / sum(w*E) with w[i][j] = (i-j)^2 /
(k-1)^2, O the observed joint distribution and E the outer product of the
marginals. Degenerate marginals (zero expected disagreement) yield 1.0 when
observed disagreement is also zero, otherwise Undefined (None).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    EmptyMatrix,
    LengthMismatch,
    LevelOutOfRange,
    NeedExactlyTwoAnnotators,
    NoSharedItems,
)
from .model import (
    MEANING_TRANSFER,
    Annotation,
    ErrorCategory,
    Project,
    ScoringConfig,
    authoritative_annotations,
)
from .scoring import Bucket, bucket, segs

LEVELS = 3  # the severity scale 0..2


@dataclass(frozen=True)
class ConfusionMatrix:
    """Paired ordinal ratings: rows = annotator A's level, cols = annotator B's."""

    k: int
    counts: tuple[tuple[int, ...], ...]
    n: int

    def transpose(self) -> "ConfusionMatrix":
        t = tuple(zip(*self.counts))
        return ConfusionMatrix(self.k, tuple(tuple(r) for r in t), self.n)


def confusion_matrix(ratings_a: Sequence[int], ratings_b: Sequence[int], k: int) -> ConfusionMatrix:
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatch(f"{len(ratings_a)} ratings vs {len(ratings_b)}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    counts = np.zeros((k, k), dtype=np.int64)
    for a, b in zip(ratings_a, ratings_b):
        a, b = int(a), int(b)
        if not (0 <= a < k and 0 <= b < k):
            raise LevelOutOfRange(f"rating pair ({a}, {b}) outside [0, {k})")
        counts[a, b] += 1
    return ConfusionMatrix(k=k, counts=tuple(tuple(int(x) for x in row) for row in counts),
                           n=len(ratings_a))


def quadratic_weights(k: int) -> np.ndarray:
    idx = np.arange(k)
    return ((idx[:, None] - idx[None, :]) ** 2) / (k - 1) ** 2


def qwk(m: ConfusionMatrix) -> float | None:
    """Quadratic weighted kappa; None means undefined under degenerate marginals."""
    if m.n == 0:
        raise EmptyMatrix("confusion matrix holds no rated items")
    counts = np.asarray(m.counts, dtype=np.float64)
    observed = counts / m.n
    rows = observed.sum(axis=1)
    cols = observed.sum(axis=0)
    expected = np.outer(rows, cols)
    w = quadratic_weights(m.k)
    wo = float((w * observed).sum())
    we = float((w * expected).sum())
    if we == 0.0:
        # All marginal mass on one identical level. Observed disagreement is
        # necessarily zero too (O's support lies inside E's); treat perfect
        # constant agreement as 1.0, anything else as undefined.
        return 1.0 if wo == 0.0 else None
    return 1.0 - wo / we


class MTCombine(str, Enum):
    """How the three meaning-transfer severities collapse to one ordinal level."""

    MAX = "max"
    CAPPED_SUM = "capped-sum"


def meaning_transfer_level(a: Annotation, mode: MTCombine = MTCombine.MAX) -> int:
    values = [int(a.severities[c]) for c in MEANING_TRANSFER]
    if mode is MTCombine.CAPPED_SUM:
        return min(sum(values), 2)
    return max(values)


_BUCKET_LEVEL = {Bucket.NO_EDIT: 0, Bucket.MINOR: 1, Bucket.MAJOR: 2}


def overall_level(a: Annotation, cfg: ScoringConfig) -> int:
    return _BUCKET_LEVEL[bucket(segs(a, cfg), cfg)]


class Dimension(str, Enum):
    FLUENCY = "Fluency"
    MEANING_TRANSFER = "MeaningTransfer"
    ADAPTATION = "Adaptation"
    OVERALL = "Overall"


BAND_POOR = "Poor"
BAND_SLIGHT = "Slight"
BAND_FAIR = "Fair"
BAND_MODERATE = "Moderate"
BAND_SUBSTANTIAL = "Substantial"
BAND_ALMOST_PERFECT = "Almost Perfect"


def band(kappa: float) -> str:
    """Landis-Koch interpretation label; upper boundary of each band inclusive."""
    if kappa < 0:
        return BAND_POOR
    if kappa <= 0.20:
        return BAND_SLIGHT
    if kappa <= 0.40:
        return BAND_FAIR
    if kappa <= 0.60:
        return BAND_MODERATE
    if kappa <= 0.80:
        return BAND_SUBSTANTIAL
    return BAND_ALMOST_PERFECT


@dataclass(frozen=True)
class AgreementRow:
    dimension: Dimension
    system_id: str
    kappa: float | None  # None = undefined (degenerate)
    band: str | None
    n_items: int


@dataclass(frozen=True)
class AgreementTable:
    rows: tuple[AgreementRow, ...]
    annotators: tuple[str, str]
    # (system, segment) pairs annotated by only one of the two annotators.
    excluded: tuple[tuple[str, str], ...]

    def row(self, dimension: Dimension, system_id: str) -> AgreementRow:
        for r in self.rows:
            if r.dimension is dimension and r.system_id == system_id:
                return r
        raise KeyError((dimension, system_id))


def _make_row(dimension: Dimension, system_id: str,
              pairs: list[tuple[int, int]]) -> AgreementRow:
    if not pairs:
        return AgreementRow(dimension, system_id, kappa=None, band=None, n_items=0)
    a, b = zip(*pairs)
    k = qwk(confusion_matrix(a, b, LEVELS))
    return AgreementRow(dimension, system_id, kappa=k,
                        band=None if k is None else band(k), n_items=len(pairs))


def agreement_table(project: Project, cfg: ScoringConfig,
                    mt_combine: MTCombine = MTCombine.MAX) -> AgreementTable:
    """Per-system QWK for each dimension, over items both annotators rated.

    Requires exactly two annotators with authoritative annotations. The
    Adaptation row only uses items where both annotators judged adaptation
    applicable; ADP is structurally missing, not zero, on gated items.
    """
    auth = authoritative_annotations(project)
    active = [ann for ann in project.annotators
              if any(key[0] == ann for key in auth)]
    if len(active) != 2:
        raise NeedExactlyTwoAnnotators(
            f"agreement needs exactly 2 annotators with annotations, found {len(active)}")
    first, second = active

    rows: list[AgreementRow] = []
    excluded: list[tuple[str, str]] = []
    for system_id in project.system_ids():
        shared: list[tuple[Annotation, Annotation]] = []
        for seg in project.segments:
            a = auth.get((first, seg.id, system_id))
            b = auth.get((second, seg.id, system_id))
            if a is not None and b is not None:
                shared.append((a, b))
            elif a is not None or b is not None:
                excluded.append((system_id, seg.id))
        if not shared:
            raise NoSharedItems(
                f"system {system_id!r} has no items annotated by both {first!r} and {second!r}")

        flu = [(int(a.severities[ErrorCategory.FLU]), int(b.severities[ErrorCategory.FLU]))
               for a, b in shared]
        mt = [(meaning_transfer_level(a, mt_combine), meaning_transfer_level(b, mt_combine))
              for a, b in shared]
        adp = [(int(a.severities[ErrorCategory.ADP]), int(b.severities[ErrorCategory.ADP]))
               for a, b in shared if a.adp_applicable and b.adp_applicable]
        overall = [(overall_level(a, cfg), overall_level(b, cfg)) for a, b in shared]

        rows.append(_make_row(Dimension.FLUENCY, system_id, flu))
        rows.append(_make_row(Dimension.MEANING_TRANSFER, system_id, mt))
        rows.append(_make_row(Dimension.ADAPTATION, system_id, adp))
        rows.append(_make_row(Dimension.OVERALL, system_id, overall))

    return AgreementTable(rows=tuple(rows), annotators=(first, second),
                          excluded=tuple(excluded))
