"""tutorstack: a personalized tutoring backend.

Knowledge tracing (BKT features + a transformer sequence model), a scraped
course knowledge base with BM25 retrieval, and retrieval-augmented answering
and study recommendations behind a REST service.
"""

__version__ = "0.1.0"

from tutorstack.interactions import Interaction

__all__ = ["Interaction", "__version__"]
