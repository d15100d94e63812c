"""Language-model subroutines: backends, parsing, refusal handling."""

from .backends import (
    LmBackend,
    PromptLibrary,
    RemoteBackend,
    ReplayBackend,
    ScriptedBackend,
)
from .mock import MockBackend, load_default_rules
from .runner import (
    AI_PHRASE,
    DEFAULT_APOLOGY_WORDS,
    OUTCOME_INVALID_OBJECT,
    OUTCOME_MALFORMED,
    OUTCOME_OK,
    OUTCOME_REFUSED,
    SCOLD_MESSAGE,
    SubroutineExchange,
    SubroutineRunner,
    detect_refusal,
    with_scolding,
)

__all__ = [
    "AI_PHRASE",
    "DEFAULT_APOLOGY_WORDS",
    "LmBackend",
    "MockBackend",
    "OUTCOME_INVALID_OBJECT",
    "OUTCOME_MALFORMED",
    "OUTCOME_OK",
    "OUTCOME_REFUSED",
    "PromptLibrary",
    "RemoteBackend",
    "ReplayBackend",
    "SCOLD_MESSAGE",
    "ScriptedBackend",
    "SubroutineExchange",
    "SubroutineRunner",
    "detect_refusal",
    "load_default_rules",
    "with_scolding",
]
