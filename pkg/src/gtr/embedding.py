"""Text-to-vector embedding with pluggable backends.

Two backends share one contract (unit-norm float64 vectors of a fixed
dimension):

* ``hashed_bow`` — offline reference backend. Lowercased tokens are hashed
  with 64-bit FNV-1a into ``dim`` buckets, counts accumulated, and the count
  vector L2-normalized. Fully deterministic, so retrieval behavior is
  computable by hand in tests.
* ``http`` — remote embedding service speaking a small JSON protocol:
  ``POST endpoint_url {"inputs": [...]}`` returning
  ``{"embeddings": [[...], ...]}``. Requests are batched, retried three
  times with exponential backoff, and any terminal failure raises
  :class:`~gtr.errors.BackendUnavailable`.

The FNV-1a seed below is fixed so stores written by one process can be
queried by another; it is part of the embedder fingerprint recorded in every
store file.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import requests

from .chunking import token_texts
from .errors import BackendUnavailable, EmptyText, InvalidConfig, ZeroVector

DEFAULT_DIM = 384

# 64-bit FNV-1a parameters; the offset basis doubles as the hash seed.
FNV_SEED = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass
class EmbedderConfig:
    backend: str = "hashed_bow"
    dim: int = DEFAULT_DIM
    endpoint_url: str | None = None
    batch_size: int = 32
    timeout_s: float = 30.0
    retry_backoff_s: float = 0.5

    def __post_init__(self):
        if self.backend not in ("hashed_bow", "http"):
            raise InvalidConfig(f"unknown embedder backend: {self.backend!r}")
        if self.dim < 1:
            raise InvalidConfig(f"dim must be positive, got {self.dim}")
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be positive, got {self.batch_size}")
        if (self.endpoint_url is not None) != (self.backend == "http"):
            raise InvalidConfig("endpoint_url must be set iff backend is 'http'")


def fingerprint(config: EmbedderConfig) -> str:
    """Identify (backend, dim, seed) so stores reject mismatched embedders."""
    if config.backend == "hashed_bow":
        return f"hashed_bow:{config.dim}:{FNV_SEED:016x}"
    return f"http:{config.dim}:{config.endpoint_url}"


def _fnv1a(data: bytes) -> int:
    h = FNV_SEED
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def bucket_index(token: str, dim: int) -> int:
    """Hash bucket of one lowercased token; exposed for hand-check tests."""
    return _fnv1a(token.encode("utf-8")) % dim


def _embed_hashed_bow(text: str, dim: int) -> np.ndarray:
    counts = np.zeros(dim, dtype=np.float64)
    for tok in token_texts(text):
        counts[bucket_index(tok.lower(), dim)] += 1.0
    norm = np.linalg.norm(counts)
    if norm == 0.0:
        # Unreachable for nonempty trimmed text: every non-space character
        # produces a token and every token lands in some bucket.
        raise ZeroVector("text produced no tokens")
    return counts / norm


def _post_with_retries(config: EmbedderConfig, payload: dict) -> dict:
    last_error: Exception | None = None
    for attempt in range(3):
        if attempt:
            time.sleep(config.retry_backoff_s * (2 ** (attempt - 1)))
        try:
            resp = requests.post(
                config.endpoint_url, json=payload, timeout=config.timeout_s
            )
        except requests.RequestException as e:
            last_error = e
            continue
        if resp.status_code != 200:
            last_error = BackendUnavailable(
                f"embedding backend returned HTTP {resp.status_code}"
            )
            continue
        try:
            return resp.json()
        except ValueError as e:
            last_error = e
            continue
    raise BackendUnavailable(
        f"embedding backend unreachable after 3 attempts: {last_error}"
    )


def _embed_http_batch(texts: list[str], config: EmbedderConfig) -> list[np.ndarray]:
    body = _post_with_retries(config, {"inputs": texts})
    embeddings = body.get("embeddings") if isinstance(body, dict) else None
    if not isinstance(embeddings, list) or len(embeddings) != len(texts):
        raise BackendUnavailable(
            "embedding backend response missing or mis-sized 'embeddings'"
        )
    out = []
    for values in embeddings:
        vec = np.asarray(values, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != config.dim:
            raise BackendUnavailable(
                f"embedding backend returned dim {vec.shape}, expected {config.dim}"
            )
        norm = np.linalg.norm(vec)
        if norm == 0.0 or not np.isfinite(norm):
            raise ZeroVector("embedding backend returned a non-normalizable vector")
        out.append(vec / norm)
    return out


def embed(text: str, config: EmbedderConfig | None = None) -> np.ndarray:
    """Embed one text into a unit-norm float64 vector of config.dim entries.

    Raises:
        EmptyText: if the text is empty after trimming whitespace.
        BackendUnavailable: http backend failures after retries.
    """
    config = config or EmbedderConfig()
    if not text.strip():
        raise EmptyText("cannot embed empty or whitespace-only text")
    if config.backend == "hashed_bow":
        return _embed_hashed_bow(text, config.dim)
    return _embed_http_batch([text], config)[0]


def embed_batch(
    texts: list[str], config: EmbedderConfig | None = None
) -> list[np.ndarray]:
    """Embed many texts; element i equals embed(texts[i], config).

    The http backend sends ceil(len/batch_size) wire requests. The first
    invalid element fails the whole batch with its index in the message.
    """
    config = config or EmbedderConfig()
    for i, text in enumerate(texts):
        if not text.strip():
            raise EmptyText(f"cannot embed empty text at index {i}")
    if config.backend == "hashed_bow":
        return [_embed_hashed_bow(t, config.dim) for t in texts]
    out: list[np.ndarray] = []
    for start in range(0, len(texts), config.batch_size):
        out.extend(_embed_http_batch(texts[start : start + config.batch_size], config))
    return out
