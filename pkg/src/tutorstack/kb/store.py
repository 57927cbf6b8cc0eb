"""The background knowledge base: ingest, persist, and search course text.

Documents and chunks live as line-delimited JSON under the data directory
(``docs.jsonl`` / ``chunks.jsonl``); the BM25 index is rebuilt on open and
swapped wholesale on each commit, so a search always runs against one
immutable snapshot. Chunks are appended and fsynced before their document
record: the document line is the commit point, and orphaned chunk lines from
an interrupted ingest are ignored on load.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from tutorstack.kb.bm25 import Bm25Index, SearchHit
from tutorstack.kb.chunking import Chunk, chunk_text
from tutorstack.kb.extract import extract_text
from tutorstack.kb.fetch import fetch

logger = logging.getLogger(__name__)

MANUAL_SOURCE = "manual"


class IngestError(Exception):
    pass


class EmptyDocumentError(IngestError):
    """The source produced no extractable text."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    source: str
    title: str
    fetched_at: int
    text: str
    n_chunks: int


@dataclass(frozen=True)
class IngestResult:
    doc_id: str
    n_chunks: int
    created: bool


def content_id(source: str, text: str) -> str:
    digest = hashlib.sha256(f"{source}\n{text}".encode("utf-8")).hexdigest()
    return digest[:16]


class KnowledgeBase:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.docs_path = self.root / "docs.jsonl"
        self.chunks_path = self.root / "chunks.jsonl"
        self._docs: dict[str, Document] = {}
        self._chunks: dict[str, list[Chunk]] = {}
        self._index = Bm25Index([])
        self._write_lock = threading.Lock()
        self._load()

    # -- persistence ---------------------------------------------------------

    @staticmethod
    def _read_jsonl(path: Path) -> list[dict]:
        if not path.exists():
            return []
        records = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError:
                    logger.warning("%s:%d: skipping torn record", path, lineno)
        return records

    def _load(self) -> None:
        chunks_by_doc: dict[str, list[Chunk]] = {}
        for rec in self._read_jsonl(self.chunks_path):
            chunk = Chunk(
                doc_id=rec["doc_id"],
                chunk_index=rec["chunk_index"],
                text=rec["text"],
                word_start=rec["word_start"],
                word_end=rec["word_end"],
            )
            chunks_by_doc.setdefault(chunk.doc_id, []).append(chunk)
        for rec in self._read_jsonl(self.docs_path):
            doc = Document(
                doc_id=rec["doc_id"],
                source=rec["source"],
                title=rec["title"],
                fetched_at=rec["fetched_at"],
                text=rec["text"],
                n_chunks=rec["n_chunks"],
            )
            chunks = sorted(chunks_by_doc.get(doc.doc_id, []), key=lambda c: c.chunk_index)
            if len(chunks) != doc.n_chunks:
                logger.warning("doc %s has %d/%d chunks; skipping", doc.doc_id, len(chunks), doc.n_chunks)
                continue
            self._docs[doc.doc_id] = doc
            self._chunks[doc.doc_id] = chunks
        self._rebuild_index()

    def _rebuild_index(self) -> None:
        all_chunks = [c for chunks in self._chunks.values() for c in chunks]
        self._index = Bm25Index(all_chunks)

    @staticmethod
    def _append_jsonl(path: Path, records: list[dict]) -> None:
        payload = "".join(json.dumps(rec, ensure_ascii=False) + "\n" for rec in records)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())

    # -- ingest ----------------------------------------------------------------

    def _commit(self, doc: Document, chunks: list[Chunk]) -> None:
        self._append_jsonl(
            self.chunks_path,
            [
                {
                    "doc_id": c.doc_id,
                    "chunk_index": c.chunk_index,
                    "text": c.text,
                    "word_start": c.word_start,
                    "word_end": c.word_end,
                }
                for c in chunks
            ],
        )
        self._append_jsonl(
            self.docs_path,
            [
                {
                    "doc_id": doc.doc_id,
                    "source": doc.source,
                    "title": doc.title,
                    "fetched_at": doc.fetched_at,
                    "text": doc.text,
                    "n_chunks": doc.n_chunks,
                }
            ],
        )
        self._docs[doc.doc_id] = doc
        self._chunks[doc.doc_id] = chunks
        self._rebuild_index()

    def _ingest(self, source: str, title: str, text: str) -> IngestResult:
        if not text.strip():
            raise EmptyDocumentError(f"no extractable text from {source!r}")
        doc_id = content_id(source, text)
        with self._write_lock:
            if doc_id in self._docs:
                return IngestResult(doc_id=doc_id, n_chunks=self._docs[doc_id].n_chunks, created=False)
            chunks = chunk_text(text, doc_id=doc_id)
            doc = Document(
                doc_id=doc_id,
                source=source,
                title=title,
                fetched_at=int(time.time() * 1000),
                text=text,
                n_chunks=len(chunks),
            )
            self._commit(doc, chunks)
            return IngestResult(doc_id=doc_id, n_chunks=len(chunks), created=True)

    def ingest_url(self, url: str, fetcher: Callable[[str], bytes] = fetch) -> IngestResult:
        """Fetch, extract, chunk, and index one course page."""
        html = fetcher(url)
        page = extract_text(html, base_url=url)
        return self._ingest(source=url, title=page.title or url, text=page.text)

    def ingest_text(self, title: str, text: str) -> IngestResult:
        """Manually uploaded learning material (raw text)."""
        return self._ingest(source=MANUAL_SOURCE, title=title, text=text)

    # -- reads ------------------------------------------------------------------

    def search(self, query: str, top_k: int = 5) -> list[SearchHit]:
        return self._index.search(query, top_k=top_k)

    @property
    def index(self) -> Bm25Index:
        return self._index

    def document(self, doc_id: str) -> Document | None:
        return self._docs.get(doc_id)

    def chunk(self, doc_id: str, chunk_index: int) -> Chunk | None:
        chunks = self._chunks.get(doc_id)
        if chunks is None or not 0 <= chunk_index < len(chunks):
            return None
        return chunks[chunk_index]

    def documents(self) -> list[Document]:
        return [self._docs[d] for d in sorted(self._docs)]

    @property
    def doc_count(self) -> int:
        return len(self._docs)

    @property
    def chunk_count(self) -> int:
        return self._index.n_chunks
