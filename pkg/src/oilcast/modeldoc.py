"""Versioned JSON model documents.

Every fitted model serializes to {"format": ..., "version": ..., ...} so
downstream tools can refuse documents they do not understand. Arrays are
stored as nested lists; loaders restore float64 ndarrays.
"""

import json

import numpy as np

VERSION = 1


def dump(path, format_name: str, payload: dict) -> None:
    doc = {"format": format_name, "version": VERSION}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, default=_jsonable)
        fh.write("\n")


def load(path, format_name: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != format_name:
        raise ValueError(
            f"expected a {format_name!r} document, found {doc.get('format')!r}"
        )
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported document version {doc.get('version')!r}")
    return doc


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
