"""Reader for annotated news corpora in CoNLL-U form.

One file per date cluster. Documents (one per news item) start at a
`# newdoc id = <item_id>` comment; sentences carry `# sent_id` and are
separated by blank lines. Token rows use the standard ten tab-separated
columns. A `Supersense=<tag>` entry in MISC carries the noun supersense
from the annotation tool; `_` or a missing entry means untagged.

The cluster manifest is JSONL with one object per news item:
`{"item_id", "date", "conllu_file", "source_index"}` where source_index
is the 0-based line of the item in the source news JSONL.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError

_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    index: int  # 1-based position within the sentence
    form: str
    lemma: str
    upos: str
    head: int  # 0 means root
    deprel: str
    misc: str = "_"

    @property
    def supersense(self):
        for part in self.misc.split("|"):
            if part.startswith("Supersense="):
                tag = part.split("=", 1)[1]
                return None if tag == "_" else tag
        return None


@dataclass
class Sentence:
    sent_id: str
    tokens: list

    def forms(self) -> list:
        return [t.form for t in self.tokens]


@dataclass
class Document:
    item_id: str
    date: str
    sentences: list


@dataclass(frozen=True)
class ManifestEntry:
    item_id: str
    date: str
    conllu_file: str
    source_index: int


def _parse_token(line: str, lineno: int) -> Token:
    cols = line.split("\t")
    if len(cols) != _COLUMNS:
        raise ParseError(
            f"line {lineno}: expected {_COLUMNS} columns, got {len(cols)}",
            line=lineno,
        )
    try:
        index = int(cols[0])
        head = int(cols[6])
    except ValueError:
        raise ParseError(
            f"line {lineno}: non-integer token id or head", line=lineno
        ) from None
    return Token(index=index, form=cols[1], lemma=cols[2], upos=cols[3],
                 head=head, deprel=cols[7], misc=cols[9])


def read_conllu(path) -> list:
    """Parse one cluster file into its documents."""
    documents = []
    current_doc = None
    current_date = ""
    sent_id = ""
    tokens = []

    def close_sentence():
        nonlocal tokens, sent_id
        if tokens:
            if current_doc is None:
                raise ParseError("token rows before any '# newdoc id' comment", line=0)
            current_doc.sentences.append(Sentence(sent_id=sent_id, tokens=tokens))
        tokens = []
        sent_id = ""

    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                close_sentence()
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("newdoc id"):
                    close_sentence()
                    current_doc = Document(
                        item_id=body.split("=", 1)[1].strip(),
                        date=current_date,
                        sentences=[],
                    )
                    documents.append(current_doc)
                elif body.startswith("date"):
                    current_date = body.split("=", 1)[1].strip()
                    if current_doc is not None and not current_doc.sentences:
                        current_doc.date = current_date
                elif body.startswith("sent_id"):
                    sent_id = body.split("=", 1)[1].strip()
                continue
            tokens.append(_parse_token(line, lineno))
    close_sentence()
    for doc in documents:
        if not doc.date:
            doc.date = current_date
    return documents


def read_manifest(path) -> list:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError(
                    f"line {lineno}: invalid JSON", line=lineno
                ) from None
            try:
                entries.append(ManifestEntry(
                    item_id=str(obj["item_id"]),
                    date=str(obj["date"]),
                    conllu_file=str(obj["conllu_file"]),
                    source_index=int(obj["source_index"]),
                ))
            except (KeyError, TypeError, ValueError):
                raise ParseError(
                    f"line {lineno}: manifest entry missing required fields",
                    line=lineno,
                ) from None
    return entries


def read_corpus(conllu_dir, manifest_path) -> dict:
    """All documents keyed by date, following the manifest."""
    entries = read_manifest(manifest_path)
    by_file = {}
    for entry in entries:
        by_file.setdefault(entry.conllu_file, []).append(entry)
    dated = {}
    for fname, file_entries in by_file.items():
        docs = {d.item_id: d for d in read_conllu(Path(conllu_dir) / fname)}
        for entry in file_entries:
            if entry.item_id not in docs:
                raise ParseError(
                    f"manifest item {entry.item_id} missing from {fname}", line=0
                )
            dated.setdefault(entry.date, []).append(docs[entry.item_id])
    return dated
