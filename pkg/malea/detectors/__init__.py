from malea.detectors.run_all import LintReport, lint, lint_report, load_lexicon
from malea.detectors.violation import QualityCriterion, Violation

__all__ = ["lint", "lint_report", "load_lexicon", "LintReport", "QualityCriterion", "Violation"]
