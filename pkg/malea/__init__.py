"""Multi-agent elicitation of ethics requirements as user stories."""
__version__ = "0.1.0"
