from .app import config_from_env, create_app
from .trial import TrialConfig, TrialError, TrialService, load_questions, resolve_answer

__all__ = [
    "TrialConfig",
    "TrialError",
    "TrialService",
    "config_from_env",
    "create_app",
    "load_questions",
    "resolve_answer",
]
