from malea.stories.decompose import decompose, decompose_all, split_obligations
from malea.stories.emitter import emit_markdown, placeholder_index
from malea.stories.export import dump_requirements, export_requirements, load_requirements
from malea.stories.parser import ParseResult, ResidueLine, parse_document, parse_stories
from malea.stories.placeholders import extract_placeholders, scan_placeholders

__all__ = [
    "parse_stories", "parse_document", "ParseResult", "ResidueLine",
    "emit_markdown", "placeholder_index",
    "extract_placeholders", "scan_placeholders",
    "decompose", "decompose_all", "split_obligations",
    "export_requirements", "dump_requirements", "load_requirements",
]
