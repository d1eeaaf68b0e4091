import logging

from flask import Flask, jsonify, request
from flask_cors import CORS

from malea.detectors.run_all import lint_report
from malea.errors import ConfigError, FormatError, MaleaError, SessionAborted
from malea.evaluation import (
    GoldRequirement, MappingRecord, compute_metrics, read_gold, read_mapping, theme_coverage, validate_mapping,
)
from malea.evaluation.cases import case_files
from malea.logging_setup import configure_logging
from malea.models import SystemDescription
from malea.orchestrator import run_baseline, run_session
from malea.providers import build_provider
from malea.stories import decompose_all, parse_document
from malea.stories.export import requirement_record

logger = logging.getLogger(__name__)


def _document(data):
    if not data or not isinstance(data.get("document"), str):
        return None
    return parse_document(data["document"])


def create_app(config=None, provider=None):
    """
    HTTP front end over the same operations as the CLI. `config` is a
    RunConfig; /run needs it, plus a provider or an API key in the environment.
    """
    configure_logging()
    app = Flask(__name__)
    CORS(app)

    @app.route("/test", methods=["GET"])
    def test():
        return {"message": "MALEA backend running"}

    @app.route("/lint", methods=["POST"])
    def lint():
        parsed = _document(request.get_json(silent=True))
        if parsed is None:
            return {"error": "document not provided"}, 400
        report = lint_report(parsed.stories)
        return jsonify({
            "stories": len(parsed.stories),
            "residue": [line.text for line in parsed.residue],
            "report": report.to_dict(),
        }), 200

    @app.route("/decompose", methods=["POST"])
    def decompose():
        data = request.get_json(silent=True)
        parsed = _document(data)
        if parsed is None:
            return {"error": "document not provided"}, 400
        mode = data.get("mode", "rule")
        if mode not in ("rule", "llm"):
            return {"error": f"unknown mode '{mode}'"}, 400
        if mode == "llm" and (provider is None or config is None):
            return {"error": "llm mode needs a provider configured for the app"}, 400
        warnings = []
        requirements = decompose_all(parsed.stories, mode, provider, config, warnings)
        return jsonify({
            "warnings": warnings,
            "requirements": [requirement_record(r) for r in requirements],
            "coverage": theme_coverage(requirements).to_dict(),
        }), 200

    @app.route("/evaluate", methods=["POST"])
    def evaluate():
        data = request.get_json(silent=True)
        if data and "case" in data:
            try:
                files = case_files(f"{data['case']}/{data.get('set', 'malea')}")
                gold = read_gold(files.gold)
                mapping = read_mapping(files.mapping)
            except (ConfigError, FormatError) as e:
                return {"error": str(e)}, 400
            report = compute_metrics(mapping, gold)
            return jsonify({"system": files.system_label, "set": files.set_label, "metrics": report.to_dict()}), 200
        if not data or "gold" not in data or "mapping" not in data:
            return {"error": "case, or gold and mapping, required"}, 400
        try:
            gold = [GoldRequirement(id=g["id"], text=g["text"], topic=g.get("topic", "")) for g in data["gold"]]
            mapping = [MappingRecord(
                gen_id=m["gen_id"],
                gold_id=m.get("gold_id") or None,
                relevant=m.get("relevant"),
                shared=m.get("shared"),
                reviewed=m.get("reviewed", True),
            ) for m in data["mapping"]]
        except (KeyError, TypeError) as e:
            return {"error": f"malformed record: {e}"}, 400

        findings = validate_mapping(mapping, gold)
        if findings:
            return jsonify({"error": "mapping validation failed", "findings": [str(f) for f in findings]}), 400
        return jsonify({"metrics": compute_metrics(mapping, gold).to_dict()}), 200

    @app.route("/run", methods=["POST"])
    def run():
        data = request.get_json(silent=True)
        if not data or not data.get("description"):
            return {"error": "description not provided"}, 400
        if config is None:
            return {"error": "server has no run configuration"}, 500
        try:
            description = SystemDescription(title=data.get("title", ""), body=data["description"])
            session_provider = provider or build_provider(config)
            runner = run_baseline if data.get("baseline") else run_session
            result = runner(config, description, session_provider)
        except ConfigError as e:
            return {"error": str(e)}, 500
        except SessionAborted as e:
            logger.error("Session aborted: %s", e)
            return jsonify({"error": str(e), "messages": len(e.transcript.messages)}), 502
        except MaleaError as e:
            logger.exception("Session failed")
            return jsonify({"error": str(e)}), 500

        return jsonify({
            "status": result.status.value,
            "termination": result.termination_summary(),
            "provider_calls": result.provider_calls,
            "final_document": result.final_document,
            "requirements": [requirement_record(r) for r in decompose_all(result.stories)],
        }), 200

    return app


if __name__ == "__main__":
    from malea.config import load_config
    import os

    config_path = os.environ.get("MALEA_CONFIG")
    app = create_app(load_config(config_path) if config_path else None)
    logger.info("Starting server on http://127.0.0.1:5000")
    app.run(host="0.0.0.0", port=5000)
