from tutorstack.service.app import ApiError, create_app
from tutorstack.service.events import EventLog, EventLogError, EventRecord
from tutorstack.service.state import AppState, UnknownStudentError

__all__ = [
    "ApiError",
    "AppState",
    "EventLog",
    "EventLogError",
    "EventRecord",
    "UnknownStudentError",
    "create_app",
]
