from tutorstack.rag.backends import (
    BackendAuthError,
    BackendError,
    BackendProtocolError,
    BackendTimeoutError,
    MockBackend,
    RemoteBackend,
    RemoteConfig,
    make_backend,
)
from tutorstack.rag.orchestrator import (
    AskResult,
    Recommendation,
    RecommendResult,
    SkillCatalog,
    SkillInfo,
    TutorOrchestrator,
    TutorUnavailableError,
)
from tutorstack.rag.prompt import PromptBundle, assemble_prompt
from tutorstack.rag.summary import LearnerStateSummary, summarize_state

__all__ = [
    "AskResult",
    "BackendAuthError",
    "BackendError",
    "BackendProtocolError",
    "BackendTimeoutError",
    "LearnerStateSummary",
    "MockBackend",
    "PromptBundle",
    "Recommendation",
    "RecommendResult",
    "RemoteBackend",
    "RemoteConfig",
    "SkillCatalog",
    "SkillInfo",
    "TutorOrchestrator",
    "TutorUnavailableError",
    "assemble_prompt",
    "make_backend",
    "summarize_state",
]
