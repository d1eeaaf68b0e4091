from dataclasses import dataclass
from typing import List, Optional, Sequence

from malea.evaluation.metrics import AggregateReport, MetricsReport

COLUMNS = ("System", "Set", "Prod.", "TP", "FP", "TP_A", "FN_A", "Prec.", "Recall", "Unique", "Unique rel.")
KEY = (
    "Key: Prod. = requirements produced; TP/FP = requirements mapped/not mapped to a gold requirement; "
    "TP_A = distinct gold requirements covered; FN_A = gold requirements missed; "
    "Prec. = TP/Prod.; Recall = TP_A/(TP_A+FN_A); Unique = unmapped and not shared with the other set; "
    "Unique rel. = unique and relevant."
)


@dataclass(frozen=True)
class MetricsRow:
    system: str
    set_name: str
    report: MetricsReport


def format_pct(value: Optional[float], places: int = 1) -> str:
    return "n/a" if value is None else f"{value * 100:.{places}f} %"


def _cells(row: MetricsRow) -> List[str]:
    r = row.report
    return [row.system, row.set_name, str(r.prod), str(r.tp), str(r.fp), str(r.tp_a), str(r.fn_a),
            format_pct(r.precision), format_pct(r.recall), str(r.unique), str(r.unique_relevant)]


def render_table(rows: Sequence[MetricsRow]) -> str:
    table = [list(COLUMNS)] + [_cells(row) for row in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(COLUMNS))]
    lines = []
    for n, line in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) if i < 2 else cell.rjust(widths[i])
                               for i, cell in enumerate(line)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    lines.append("")
    lines.append(KEY)
    return "\n".join(lines)


def render_aggregate(agg: AggregateReport, label: str = "") -> str:
    prefix = f"{label}: " if label else ""
    return "\n".join([
        f"{prefix}{agg.cases} case(s), Σprod {agg.prod}, Σtp {agg.tp}, Σtp_a {agg.tp_a}, Σfn_a {agg.fn_a}",
        f"  pooled precision Σtp/Σprod            = {format_pct(agg.pooled_precision, 2)}",
        f"  pooled recall Σtp/(Σtp+Σfn_a)         = {format_pct(agg.pooled_recall_tp, 2)}",
        f"  pooled recall Σtp_a/(Σtp_a+Σfn_a)     = {format_pct(agg.pooled_recall_tp_a, 2)}",
    ])


def report_records(rows: Sequence[MetricsRow]) -> List[dict]:
    return [{"system": row.system, "set": row.set_name, **row.report.to_dict()} for row in rows]
