"""HTML to LLM-friendly structured text.

Boilerplate containers (script/style/nav/footer) are dropped, headings become
``#``-prefixed lines, list items become ``- `` lines, captions and subtitle
elements stay inline, and whitespace collapses to single spaces within a
line. Paragraph blocks are separated by blank lines.

Feeding the extractor its own output (wrapped in a trivial tag) reproduces
the text: blank lines re-split blocks and marker lines (``#``/``- ``) keep
their own lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

DROP_TAGS = {"script", "style", "nav", "footer"}
HEADING_TAGS = {f"h{n}": n for n in range(1, 7)}
# tags that end the current line and separate paragraph blocks
BLOCK_TAGS = {
    "p", "div", "section", "article", "main", "aside", "header",
    "blockquote", "pre", "table", "tr", "ul", "ol", "dl", "hr", "figure",
}
CAPTION_TAGS = {"figcaption", "caption"}
_CAPTION_CLASS = re.compile(r"caption|subtitle", re.IGNORECASE)
_MARKER_LINE = re.compile(r"^(#{1,6} |- )")
_BLANK_SPLIT = re.compile(r"\n[ \t]*\n")


@dataclass
class ExtractedPage:
    title: str
    text: str


class _Extractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks: list[list[str]] = []
        self._block: list[str] = []
        self._line: list[str] = []
        self._prefix = ""
        self._drop_depth = 0
        self._in_title = False
        self._title_parts: list[str] = []
        self._first_heading: str | None = None
        self._heading_level = 0
        self._heading_parts: list[str] = []
        self.saw_tag = False

    # -- line/block assembly -------------------------------------------------

    def _flush_line(self):
        text = " ".join(" ".join(self._line).split())
        if text:
            self._block.append(self._prefix + text)
        self._line = []
        self._prefix = ""

    def _flush_block(self):
        self._flush_line()
        if self._block:
            self.blocks.append(self._block)
            self._block = []

    # -- parser hooks ----------------------------------------------------------

    def handle_starttag(self, tag, attrs):
        self.saw_tag = True
        if tag in DROP_TAGS:
            self._drop_depth += 1
            return
        if self._drop_depth:
            return
        if tag == "title":
            self._in_title = True
            return
        if tag in HEADING_TAGS:
            self._flush_block()
            self._heading_level = HEADING_TAGS[tag]
            self._heading_parts = []
            return
        if self._heading_level:
            return  # nested markup inside a heading contributes text only
        if tag == "li":
            self._flush_line()
            self._prefix = "- "
            return
        if tag == "br":
            self._flush_line()
            return
        if tag == "track":
            label = dict(attrs).get("label")
            if label:
                self._line.append(label)
            return
        if tag in BLOCK_TAGS:
            self._flush_block()
            return
        # caption-like inline elements keep flowing into the current line
        classes = dict(attrs).get("class", "")
        if tag in CAPTION_TAGS or _CAPTION_CLASS.search(classes or ""):
            return

    def handle_endtag(self, tag):
        self.saw_tag = True
        if tag in DROP_TAGS:
            self._drop_depth = max(0, self._drop_depth - 1)
            return
        if self._drop_depth:
            return
        if tag == "title":
            self._in_title = False
            return
        if tag in HEADING_TAGS:
            text = " ".join(" ".join(self._heading_parts).split())
            level = self._heading_level or HEADING_TAGS[tag]
            self._heading_level = 0
            if text:
                if self._first_heading is None:
                    self._first_heading = text
                self.blocks.append(["#" * level + " " + text])
            return
        if tag == "li":
            self._flush_line()
            return
        if tag in BLOCK_TAGS:
            self._flush_block()
            return

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_data(self, data):
        if self._drop_depth:
            return
        if self._in_title:
            self._title_parts.append(data)
            return
        if self._heading_level:
            self._heading_parts.append(data)
            return
        # blank lines in raw text separate blocks; marker lines keep their own
        # line — this is what makes re-extracting our own output a no-op
        for i, segment in enumerate(_BLANK_SPLIT.split(data)):
            if i > 0:
                self._flush_block()
            for line in segment.split("\n"):
                if _MARKER_LINE.match(line.lstrip()):
                    self._flush_line()
                    stripped = line.lstrip()
                    marker_end = stripped.index(" ") + 1
                    self._prefix = stripped[:marker_end]
                    self._line.append(stripped[marker_end:])
                    self._flush_line()
                else:
                    self._line.append(line)

    def result(self) -> ExtractedPage:
        self._flush_block()
        text = "\n\n".join("\n".join(block) for block in self.blocks)
        title = " ".join(" ".join(self._title_parts).split())
        if not title and self._first_heading:
            title = self._first_heading
        return ExtractedPage(title=title, text=text)


def extract_text(html: bytes | str, base_url: str = "") -> ExtractedPage:
    """Extract title and structured text from an HTML byte stream.

    Input that contains no markup at all yields an empty page (the caller
    decides whether to skip it). Non-UTF-8 bytes are decoded with
    replacement characters.
    """
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    parser = _Extractor()
    parser.feed(html)
    parser.close()
    if not parser.saw_tag:
        return ExtractedPage(title="", text="")
    return parser.result()
