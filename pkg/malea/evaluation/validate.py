import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Sequence

from malea.evaluation.formats import GoldRequirement, MappingRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Finding:
    kind: str
    subject: str
    detail: str

    def __str__(self):
        return f"{self.kind} {self.subject}: {self.detail}"


def validate_mapping(mapping: Sequence[MappingRecord], gold: Sequence[GoldRequirement],
                     requirements: Optional[Sequence] = None) -> List[Finding]:
    findings = []

    for gold_id, count in Counter(g.id for g in gold).items():
        if count > 1:
            findings.append(Finding("duplicate_gold_id", gold_id, f"appears {count} times in the gold set"))

    for gen_id, count in Counter(r.gen_id for r in mapping).items():
        if count > 1:
            findings.append(Finding("duplicate_gen_id", gen_id, f"appears in {count} mapping records"))

    gold_ids = {g.id for g in gold}
    for record in mapping:
        if record.gold_id is not None and record.gold_id not in gold_ids:
            findings.append(Finding("unknown_gold_id", record.gen_id, f"gold id {record.gold_id} is not in the gold set"))
        if record.gold_id is None and record.relevant is None:
            findings.append(Finding("missing_relevance", record.gen_id, "unmapped record needs relevant=true/false"))

    if requirements is not None:
        known = {r.id for r in requirements}
        mapped = {r.gen_id for r in mapping}
        for record in mapping:
            if record.gen_id not in known:
                findings.append(Finding("unknown_gen_id", record.gen_id, "not in the requirements export"))
        for req_id in sorted(known - mapped):
            findings.append(Finding("missing_record", req_id, "requirement has no mapping record"))

    for finding in findings:
        logger.warning("Mapping validation: %s", finding)
    return findings
