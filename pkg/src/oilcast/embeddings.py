"""Plain-text word embedding tables.

Format: one token per line followed by its vector, whitespace separated.
Every line must carry the same dimension. Lookups for unknown tokens
return the zero vector so downstream feature builders never branch on
vocabulary membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("embedding dimension must be positive")
        self._zero = np.zeros(self.dim)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def lookup(self, token: str) -> np.ndarray:
        """Vector for `token`; zero vector when out of vocabulary."""
        return self.vectors.get(token, self._zero)

    def mean(self, tokens) -> np.ndarray:
        """Mean vector over tokens; zero vector for an empty list."""
        toks = list(tokens)
        if not toks:
            return np.zeros(self.dim)
        return np.mean([self.lookup(t) for t in toks], axis=0)


def load_embeddings(path) -> EmbeddingTable:
    """Parse an embedding file; dimension fixed by the first line."""
    vectors = {}
    dim = None
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParseError(f"line {lineno}: token with no vector", line=lineno)
            token = parts[0]
            try:
                vec = np.array([float(v) for v in parts[1:]])
            except ValueError:
                raise ParseError(
                    f"line {lineno}: non-numeric vector component", line=lineno
                ) from None
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise ParseError(
                    f"line {lineno}: expected {dim} components, got {vec.size}",
                    line=lineno,
                )
            if not np.all(np.isfinite(vec)):
                raise ParseError(f"line {lineno}: non-finite component", line=lineno)
            vectors[token] = vec
    if dim is None:
        raise ParseError("embedding file has no vectors", line=0)
    return EmbeddingTable(dim=dim, vectors=vectors)
