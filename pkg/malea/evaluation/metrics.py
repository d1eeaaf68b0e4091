"""
Per-case metrics and pooled figures over several cases.

Per case, recall counts distinct gold requirements covered:
    recall = tp_a / (tp_a + fn_a)
Pooled over cases two recall figures are reported side by side:
    pooled_recall_tp   = Σtp   / (Σtp + Σfn_a)
    pooled_recall_tp_a = Σtp_a / (Σtp_a + Σfn_a)
The first is the headline figure returned by aggregate_recall.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from malea.evaluation.formats import GoldRequirement, MappingRecord

logger = logging.getLogger(__name__)


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator else None


@dataclass(frozen=True)
class MetricsReport:
    prod: int
    tp: int
    fp: int
    tp_a: int
    fn_a: int
    unique: int
    unique_relevant: int

    def __post_init__(self):
        if self.prod != self.tp + self.fp:
            raise ValueError("prod must equal tp + fp")
        if self.tp_a > self.tp:
            raise ValueError("tp_a cannot exceed tp")
        if min(self.prod, self.tp, self.fp, self.tp_a, self.fn_a, self.unique, self.unique_relevant) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def gold_size(self) -> int:
        return self.tp_a + self.fn_a

    @property
    def precision(self) -> Optional[float]:
        return _ratio(self.tp, self.prod)

    @property
    def recall(self) -> Optional[float]:
        return _ratio(self.tp_a, self.tp_a + self.fn_a)

    def to_dict(self) -> dict:
        return {
            "prod": self.prod, "tp": self.tp, "fp": self.fp, "tp_a": self.tp_a, "fn_a": self.fn_a,
            "precision": self.precision, "recall": self.recall,
            "unique": self.unique, "unique_relevant": self.unique_relevant,
        }


def compute_metrics(mapping: Sequence[MappingRecord], gold: Sequence[GoldRequirement]) -> MetricsReport:
    gold_ids = {g.id for g in gold}
    prod = len(mapping)
    tp = sum(1 for r in mapping if r.mapped)
    tp_a = len({r.gold_id for r in mapping if r.mapped and r.gold_id in gold_ids})
    # an absent shared flag counts as not shared
    unique = [r for r in mapping if not r.mapped and not r.shared]
    report = MetricsReport(
        prod=prod,
        tp=tp,
        fp=prod - tp,
        tp_a=tp_a,
        fn_a=len(gold_ids) - tp_a,
        unique=len(unique),
        unique_relevant=sum(1 for r in unique if r.relevant is True),
    )
    logger.debug("Metrics: %s", report.to_dict())
    return report


@dataclass(frozen=True)
class AggregateReport:
    cases: int
    prod: int
    tp: int
    fp: int
    tp_a: int
    fn_a: int
    unique: int
    unique_relevant: int

    @property
    def pooled_precision(self) -> Optional[float]:
        return _ratio(self.tp, self.prod)

    @property
    def pooled_recall_tp(self) -> Optional[float]:
        return _ratio(self.tp, self.tp + self.fn_a)

    @property
    def pooled_recall_tp_a(self) -> Optional[float]:
        return _ratio(self.tp_a, self.tp_a + self.fn_a)

    @property
    def aggregate_recall(self) -> Optional[float]:
        return self.pooled_recall_tp

    def to_dict(self) -> dict:
        return {
            "cases": self.cases, "prod": self.prod, "tp": self.tp, "fp": self.fp,
            "tp_a": self.tp_a, "fn_a": self.fn_a,
            "unique": self.unique, "unique_relevant": self.unique_relevant,
            "pooled_precision": self.pooled_precision,
            "pooled_recall_tp": self.pooled_recall_tp,
            "pooled_recall_tp_a": self.pooled_recall_tp_a,
        }


def aggregate(reports: Sequence[MetricsReport]) -> AggregateReport:
    if not reports:
        raise ValueError("aggregate needs at least one metrics report")
    return AggregateReport(
        cases=len(reports),
        prod=sum(r.prod for r in reports),
        tp=sum(r.tp for r in reports),
        fp=sum(r.fp for r in reports),
        tp_a=sum(r.tp_a for r in reports),
        fn_a=sum(r.fn_a for r in reports),
        unique=sum(r.unique for r in reports),
        unique_relevant=sum(r.unique_relevant for r in reports),
    )
