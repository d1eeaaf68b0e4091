"""
Gold sets and mapping records as header-validated CSV files.

    gold.csv      id,topic,text
    mapping.csv   gen_id,gold_id,relevant,shared,reviewed
"""
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from malea.errors import FormatError

GOLD_HEADER = ["id", "topic", "text"]
MAPPING_HEADER = ["gen_id", "gold_id", "relevant", "shared", "reviewed"]


@dataclass(frozen=True)
class GoldRequirement:
    id: str
    text: str
    topic: str = ""


@dataclass(frozen=True)
class MappingRecord:
    gen_id: str
    gold_id: Optional[str] = None
    relevant: Optional[bool] = None
    shared: Optional[bool] = None
    reviewed: bool = True

    @property
    def mapped(self) -> bool:
        return self.gold_id is not None


def _parse_bool(value: str, path, line_no: int, column: str) -> Optional[bool]:
    value = (value or "").strip().lower()
    if value == "":
        return None
    if value in ("true", "yes", "1"):
        return True
    if value in ("false", "no", "0"):
        return False
    raise FormatError(path, line_no, f"column '{column}' must be true, false or empty, got '{value}'")


def _format_bool(value: Optional[bool]) -> str:
    return "" if value is None else ("true" if value else "false")


def _rows(path, header):
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise FormatError(path, None, f"cannot open: {e}")
    with handle:
        reader = csv.reader(handle)
        first = next(reader, None)
        if first is None or [c.strip() for c in first] != header:
            raise FormatError(path, 1, f"expected header {','.join(header)}")
        for line_no, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise FormatError(path, line_no, f"expected {len(header)} columns, got {len(row)}")
            yield line_no, [cell.strip() for cell in row]


def read_gold(path) -> List[GoldRequirement]:
    gold = []
    for line_no, (gold_id, topic, text) in _rows(path, GOLD_HEADER):
        if not gold_id or not text:
            raise FormatError(path, line_no, "gold requirement needs an id and a text")
        gold.append(GoldRequirement(id=gold_id, text=text, topic=topic))
    return gold


def read_mapping(path) -> List[MappingRecord]:
    records = []
    for line_no, (gen_id, gold_id, relevant, shared, reviewed) in _rows(path, MAPPING_HEADER):
        if not gen_id:
            raise FormatError(path, line_no, "mapping record needs a gen_id")
        records.append(MappingRecord(
            gen_id=gen_id,
            gold_id=gold_id or None,
            relevant=_parse_bool(relevant, path, line_no, "relevant"),
            shared=_parse_bool(shared, path, line_no, "shared"),
            reviewed=_parse_bool(reviewed, path, line_no, "reviewed") is not False,
        ))
    return records


def write_mapping(records: Sequence[MappingRecord], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(MAPPING_HEADER)
        for r in records:
            writer.writerow([r.gen_id, r.gold_id or "", _format_bool(r.relevant), _format_bool(r.shared),
                             _format_bool(r.reviewed)])
    return path
