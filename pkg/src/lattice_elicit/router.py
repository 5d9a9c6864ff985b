"""Semantic routing: pick the application family nearest to a vision text.

The default embedding is a deterministic hashed bag-of-tokens with TF
weighting (256 buckets, L2-normalized) so routing works offline and in CI.
The nearest-centroid rule is embedding-agnostic: any callable producing
EmbeddingVector values of one fixed dimension can be swapped in (for
instance a remote sentence-embedding endpoint).
"""

from __future__ import annotations

import logging
import re
import zlib
from dataclasses import dataclass

import numpy as np

from .model import LatticeRegistry

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 256

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    """A fixed-dimension unit vector (or the zero vector for empty text)."""

    values: tuple
    norm: float

    @property
    def degenerate(self) -> bool:
        return self.norm == 0.0

    def cosine(self, other: "EmbeddingVector") -> float:
        if self.degenerate or other.degenerate:
            return 0.0
        return float(np.dot(self.values, other.values))


@dataclass(frozen=True)
class FamilyCentroid:
    family_id: str
    centroid: EmbeddingVector
    sample_count: int


def _normalize(vec: np.ndarray) -> EmbeddingVector:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return EmbeddingVector(values=tuple(float(x) for x in vec), norm=0.0)
    return EmbeddingVector(values=tuple(float(x) for x in vec / norm), norm=1.0)


def embed(text: str, dim: int = EMBEDDING_DIM) -> EmbeddingVector:
    """Hashed term-frequency embedding, L2-normalized.

    Deterministic across runs and platforms (crc32 bucket hashing, case-folded
    alphanumeric tokens). Empty or token-free text yields the degenerate zero
    vector.
    """
    vec = np.zeros(dim, dtype=np.float64)
    for token in _TOKEN_RE.findall(text.casefold()):
        vec[zlib.crc32(token.encode("utf-8")) % dim] += 1.0
    if not vec.any():
        return EmbeddingVector(values=tuple(vec), norm=0.0)
    return _normalize(vec)


class RemoteEmbedder:
    """Optional remote embedding endpoint honoring the same vector contract.

    POST {url} with {"text": str}; response {"embedding": [float, ...]} of
    the configured dimension. Vectors are L2-normalized on receipt, so the
    routing rules behave identically to the offline default.
    """

    def __init__(self, url: str, dim: int = EMBEDDING_DIM, timeout: float = 30.0,
                 session=None):
        import requests

        self.url = url
        self.dim = dim
        self.timeout = timeout
        self.session = session or requests.Session()

    def __call__(self, text: str) -> EmbeddingVector:
        import requests

        from .errors import TransportError

        try:
            resp = self.session.post(
                self.url, json={"text": text}, timeout=self.timeout
            )
            resp.raise_for_status()
            body = resp.json()
        except (requests.RequestException, ValueError) as exc:
            raise TransportError(f"embedding endpoint failed: {exc}") from exc
        values = body.get("embedding") if isinstance(body, dict) else None
        if not isinstance(values, list) or len(values) != self.dim:
            raise TransportError(
                f"embedding endpoint returned a bad vector (want dim {self.dim})"
            )
        vec = np.asarray(values, dtype=np.float64)
        if not vec.any():
            return EmbeddingVector(values=tuple(vec), norm=0.0)
        return _normalize(vec)


def build_centroids(
    registry: LatticeRegistry, embedder=embed
) -> list[FamilyCentroid]:
    """Per-family normalized mean of description-sample embeddings.

    Every family must supply at least one description sample; this is a
    configuration error, not a routing-time condition.
    """
    centroids = []
    for family_id in registry.family_ids():
        samples = registry.get(family_id).description_samples
        if not samples:
            raise ValueError(f"family {family_id} has no description_samples")
        mat = np.array([embedder(s).values for s in samples], dtype=np.float64)
        centroids.append(
            FamilyCentroid(
                family_id=family_id,
                centroid=_normalize(mat.mean(axis=0)),
                sample_count=len(samples),
            )
        )
    return centroids


def similarity_scores(
    vision: str, centroids: list[FamilyCentroid], embedder=embed
) -> dict:
    """Cosine similarity of the vision against every family centroid."""
    if not centroids:
        raise ValueError("no centroids configured")
    vision_vec = embedder(vision)
    if vision_vec.degenerate:
        logger.warning("vision text has no tokens; all similarities are zero")
    return {
        c.family_id: vision_vec.cosine(c.centroid)
        for c in sorted(centroids, key=lambda c: c.family_id)
    }


def route(vision: str, centroids: list[FamilyCentroid], embedder=embed) -> str:
    """Nearest centroid by cosine similarity.

    Ties resolve to the lexicographically first family_id; a degenerate
    (token-free) vision scores 0 everywhere and therefore lands on the first
    family.
    """
    scores = similarity_scores(vision, centroids, embedder)
    return max(sorted(scores), key=lambda fid: scores[fid])
