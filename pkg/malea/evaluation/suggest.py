import logging
import re
from typing import List, Sequence

from malea.errors import ProviderError
from malea.evaluation.formats import GoldRequirement, MappingRecord
from malea.personas import build_mapping_request

logger = logging.getLogger(__name__)

LINE_RE = re.compile(
    r"^\s*[-*]?\s*(?P<gen>[\w.\-]+)\s*(?:->|→|:)\s*(?:(?P<none>none)\s*(?:\((?P<rel>relevant|irrelevant)\))?|(?P<gold>[\w.\-]+))",
    re.IGNORECASE,
)


def parse_suggestions(text: str, requirement_ids: Sequence[str], gold_ids: Sequence[str]) -> List[MappingRecord]:
    known_gold = {g.upper(): g for g in gold_ids}
    answers = {}
    for line in text.splitlines():
        match = LINE_RE.match(line)
        if not match or match.group("gen") not in requirement_ids or match.group("gen") in answers:
            continue
        gold = match.group("gold")
        if gold and gold.upper() in known_gold:
            answers[match.group("gen")] = MappingRecord(match.group("gen"), gold_id=known_gold[gold.upper()],
                                                        reviewed=False)
        elif match.group("none"):
            relevant = (match.group("rel") or "").lower() == "relevant"
            answers[match.group("gen")] = MappingRecord(match.group("gen"), relevant=relevant, shared=False,
                                                        reviewed=False)

    records = []
    for req_id in requirement_ids:
        record = answers.get(req_id)
        if record is None:
            logger.warning("No usable mapping suggestion for %s; left unmapped and not relevant", req_id)
            record = MappingRecord(req_id, relevant=False, shared=False, reviewed=False)
        records.append(record)
    return records


def suggest_mapping(requirements, gold: Sequence[GoldRequirement], provider, config) -> List[MappingRecord]:
    """Draft mapping for human review; every record is written unreviewed."""
    ids = [r.id for r in requirements]
    try:
        response = provider.complete(build_mapping_request(requirements, gold, config))
        text = response.content
    except ProviderError as e:
        logger.error("Mapping suggestion failed: %s", e)
        raise
    records = parse_suggestions(text, ids, [g.id for g in gold])
    logger.info("Suggested mapping: %d of %d requirements mapped", sum(r.mapped for r in records), len(records))
    return records
