from tutorstack.kb.bm25 import Bm25Index, SearchHit, bm25_score, tokenize
from tutorstack.kb.chunking import Chunk, chunk_text
from tutorstack.kb.extract import ExtractedPage, extract_text
from tutorstack.kb.fetch import (
    FetchError,
    FetchTimeoutError,
    HttpStatusError,
    NetworkError,
    ResponseTooLargeError,
    SchemeNotAllowedError,
    fetch,
)
from tutorstack.kb.store import (
    Document,
    EmptyDocumentError,
    IngestError,
    IngestResult,
    KnowledgeBase,
)

__all__ = [
    "Bm25Index",
    "Chunk",
    "Document",
    "EmptyDocumentError",
    "ExtractedPage",
    "FetchError",
    "FetchTimeoutError",
    "HttpStatusError",
    "IngestError",
    "IngestResult",
    "KnowledgeBase",
    "NetworkError",
    "ResponseTooLargeError",
    "SchemeNotAllowedError",
    "SearchHit",
    "bm25_score",
    "chunk_text",
    "extract_text",
    "fetch",
    "tokenize",
]
