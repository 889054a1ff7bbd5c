"""Query/document text rendering for embedding extraction.

Five tag formats and four instruction texts are compiled in as byte-exact
constants; they are part of the model-input contract, not a user knob.
Queries are wrapped as ``Instruct: {instruction}\\nQuery: {tagged text}``
(the convention of the Mistral-family embedding models); documents are
rendered as ``{title}\\n{abstract}`` with no instruction wrapper.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

TAG_PATTERNS = {
    1: "{title}\n{body}",
    2: "<question_title> {title} </question_title>\n<question_body> {body} </question_body>",
    3: "{title}. {body}",
    4: "Title: {title}\nContent: {body}",
    5: "<title> {title} </title>\n<content> {body} </content>",
}

INSTRUCTION_TEXTS = {
    1: "Given a question including title and body, retrieve relevant papers that answer the question.",
    2: "Given a question including title and body, retrieve the paper's title and abstract that answer the question.",
    3: "Given a web search query, retrieve relevant passages that answer the query.",
    4: "Given a question, retrieve passages that answer the question.",
}

# Tested (model, tag, instruction) -> reported score. Two rows reference an
# instruction id 5 that has no published text; they are reproduced verbatim
# and are valid registry entries, but cannot be rendered.
_CONFIG_ROWS = (
    ("SFR-Embedding-Mistral", 1, 1, 0.18390),
    ("SFR-Embedding-Mistral", 1, 2, 0.18659),
    ("SFR-Embedding-Mistral", 1, 5, 0.18503),
    ("GritLM-7B", 2, 1, 0.18622),
    ("GritLM-7B", 2, 2, 0.18367),
    ("GritLM-7B", 2, 4, 0.18603),
    ("Linq-Embed-Mistral", 4, 1, 0.18521),
    ("Linq-Embed-Mistral", 4, 2, 0.18925),
    ("Linq-Embed-Mistral", 4, 3, 0.18468),
    ("Linq-Embed-Mistral", 4, 4, 0.18530),
    ("NV-Embed-v1", 1, 1, 0.18103),
    ("NV-Embed-v1", 3, 1, 0.18315),
    ("NV-Embed-v1", 4, 1, 0.18285),
    ("NV-Embed-v1", 4, 2, 0.18251),
    ("NV-Embed-v1", 4, 3, 0.18185),
    ("NV-Embed-v1", 4, 4, 0.18228),
    ("NV-Embed-v1", 4, 5, 0.18174),
)


@dataclass(frozen=True)
class QueryRecord:
    id: str
    title: str = ""
    body: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("query id must be non-empty")
        if not self.title and not self.body:
            raise ValueError(f"query {self.id!r}: title and body are both empty")


@dataclass(frozen=True)
class DocRecord:
    id: str
    title: str = ""
    abstract: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")


@dataclass(frozen=True)
class ConfigEntry:
    model_name: str
    tag_id: int
    instruction_id: int
    reported_score: Optional[float] = None


def substitute_pattern(pattern: str, title: str, body: str) -> str:
    """Fill a pattern holding exactly one {title} and one {body}, verbatim.

    No trimming, escaping, or whitespace normalization is applied; a brace
    sequence inside the title or body is inert.
    """
    if pattern.count("{title}") != 1 or pattern.count("{body}") != 1:
        raise ValueError("pattern needs exactly one {title} and one {body}")
    head, rest = pattern.split("{title}")
    mid, tail = rest.split("{body}")
    return head + title + mid + body + tail


def render_tag(query: QueryRecord, tag_id: int) -> str:
    pattern = TAG_PATTERNS.get(tag_id)
    if pattern is None:
        raise ValueError(f"unknown tag {tag_id}")
    return substitute_pattern(pattern, query.title, query.body)


def render_query_prompt(query: QueryRecord, tag_id: int, instruction_id: int) -> str:
    instruction = INSTRUCTION_TEXTS.get(instruction_id)
    if instruction is None:
        raise ValueError(f"unknown instruction {instruction_id}")
    return f"Instruct: {instruction}\nQuery: {render_tag(query, tag_id)}"


def render_query_prompt_custom(query: QueryRecord, pattern: str, instruction: str) -> str:
    """Wrapper for experimentation with templates outside the registry."""
    return f"Instruct: {instruction}\nQuery: {substitute_pattern(pattern, query.title, query.body)}"


def render_document(doc: DocRecord) -> str:
    return f"{doc.title}\n{doc.abstract}"


def config_matrix() -> tuple[ConfigEntry, ...]:
    """All tested (model, tag, instruction) configurations with scores."""
    return tuple(ConfigEntry(*row) for row in _CONFIG_ROWS)


def read_query_jsonl(path) -> list[QueryRecord]:
    """Parse ``{"id":..., "title":..., "body":...}`` JSON lines."""
    return _read_jsonl(path, QueryRecord, ("title", "body"))


def read_document_jsonl(path) -> list[DocRecord]:
    """Parse ``{"id":..., "title":..., "abstract":...}`` JSON lines."""
    return _read_jsonl(path, DocRecord, ("title", "abstract"))


def _read_jsonl(path, cls, text_fields):
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {e}") from e
            if not isinstance(obj, dict) or "id" not in obj:
                raise ValueError(f"{path}:{lineno}: record must be an object with an 'id'")
            try:
                records.append(
                    cls(str(obj["id"]), *(str(obj.get(k, "")) for k in text_fields))
                )
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from e
    return records
