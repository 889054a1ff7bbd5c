"""Prompt conventions shared with the fusion pipeline.

Queries: ``Instruct: {instruction}\\nQuery: {tagged title/body}``.
Documents: ``{title}\\n{abstract}``, no instruction wrapper.
"""

from __future__ import annotations

import json

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


def render_query(title: str, body: str, tag_id: int, instruction_id: int) -> str:
    pattern = TAG_PATTERNS.get(tag_id)
    if pattern is None:
        raise ValueError(f"unknown tag {tag_id}")
    instruction = INSTRUCTION_TEXTS.get(instruction_id)
    if instruction is None:
        raise ValueError(f"unknown instruction {instruction_id}")
    head, rest = pattern.split("{title}")
    mid, tail = rest.split("{body}")
    tagged = head + title + mid + body + tail
    return f"Instruct: {instruction}\nQuery: {tagged}"


def render_document(title: str, abstract: str) -> str:
    return f"{title}\n{abstract}"


def load_records(path, kind: str) -> list[tuple[str, str]]:
    """Read JSONL records, returning (id, rendered-ready fields) pairs.

    Queries keep (id, title, body); documents (id, title, abstract). Either
    is returned as (id, (field_a, field_b)) for the caller to render.
    """
    text_keys = ("title", "body") if kind == "query" else ("title", "abstract")
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
            if not isinstance(obj, dict) or not obj.get("id"):
                raise ValueError(f"{path}:{lineno}: record needs a non-empty 'id'")
            if "text" in obj:  # pre-rendered input passes through untouched
                records.append((str(obj["id"]), str(obj["text"]), None))
            else:
                a, b = (str(obj.get(k, "")) for k in text_keys)
                records.append((str(obj["id"]), a, b))
    return records
