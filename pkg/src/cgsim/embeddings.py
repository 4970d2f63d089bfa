"""Embedding providers: file-backed, HTTP, deterministic, and cached.

A provider turns an ordered list of canonical phrases into an equal-length
list of fixed-dimension vectors. Providers must be deterministic for a given
identity string, and must tolerate concurrent read requests.

Vectors are plain tuples of floats so they stay immutable and hashable.
"""

from __future__ import annotations

import abc
import hashlib
import math
import os
import random
import tempfile
import threading
from typing import Sequence

import requests

from .errors import (
    EmbeddingStoreError,
    EmbedProtocolError,
    EmbedTransportError,
    MissingEmbeddingError,
    ProviderMismatchError,
)

Vector = tuple[float, ...]


class EmbeddingProvider(abc.ABC):
    """Contract: embed() preserves order and length; dim is constant."""

    @property
    @abc.abstractmethod
    def dim(self) -> int: ...

    @property
    @abc.abstractmethod
    def provider_id(self) -> str: ...

    @abc.abstractmethod
    def embed(self, phrases: Sequence[str]) -> list[Vector]: ...


# --- TSV store ----------------------------------------------------------------
#
# Header line:  #dim=<d>\t#provider=<id>
# Data lines:   phrase<TAB>v1<TAB>...<TAB>vd

def read_store(path: str) -> tuple[dict[str, Vector], int, str]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise EmbeddingStoreError("empty store file", f"{path}:1")
    header = lines[0].split("\t")
    if len(header) != 2 or not header[0].startswith("#dim=") \
            or not header[1].startswith("#provider="):
        raise EmbeddingStoreError(
            "expected header '#dim=<d>\\t#provider=<id>'", f"{path}:1"
        )
    try:
        dim = int(header[0][len("#dim="):])
    except ValueError:
        raise EmbeddingStoreError("dim is not an integer", f"{path}:1") from None
    if dim <= 0:
        raise EmbeddingStoreError(f"dim must be positive, got {dim}", f"{path}:1")
    provider_id = header[1][len("#provider="):]

    entries: dict[str, Vector] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != dim + 1:
            raise EmbeddingStoreError(
                f"expected {dim} values, got {len(parts) - 1}", f"{path}:{lineno}"
            )
        try:
            vector = tuple(float(x) for x in parts[1:])
        except ValueError:
            raise EmbeddingStoreError("non-numeric value", f"{path}:{lineno}") from None
        if not all(math.isfinite(x) for x in vector):
            raise EmbeddingStoreError("non-finite value", f"{path}:{lineno}")
        entries[parts[0]] = vector
    return entries, dim, provider_id


def write_store(path: str, entries: dict[str, Vector], dim: int, provider_id: str) -> None:
    """Atomic write: the previous snapshot survives a crash mid-write."""
    lines = [f"#dim={dim}\t#provider={provider_id}"]
    for phrase, vector in entries.items():
        lines.append(phrase + "\t" + "\t".join(repr(x) for x in vector))
    payload = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".store-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class FileProvider(EmbeddingProvider):
    """Serves exactly the phrases listed in a TSV store file."""

    def __init__(self, entries: dict[str, Vector], dim: int, provider_id: str):
        self._entries = dict(entries)
        self._dim = dim
        self._provider_id = provider_id

    @classmethod
    def load(cls, path: str) -> "FileProvider":
        entries, dim, provider_id = read_store(path)
        return cls(entries, dim, provider_id)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def provider_id(self) -> str:
        return self._provider_id

    def embed(self, phrases: Sequence[str]) -> list[Vector]:
        out = []
        for phrase in phrases:
            try:
                out.append(self._entries[phrase])
            except KeyError:
                raise MissingEmbeddingError(
                    f"no embedding stored for {phrase!r}"
                ) from None
        return out


class HttpProvider(EmbeddingProvider):
    """Talks to an embed endpoint: POST <base>/embed with {"texts": [...]},
    expecting {"vectors": [[...]...], "dim": int, "model": str}.

    Requests are sent in batches; dim and identity are learned from the
    server's responses (probed with an empty batch on first use).
    """

    def __init__(self, base_url: str, batch_size: int = 64, timeout: float = 30.0):
        self._url = base_url.rstrip("/") + "/embed"
        self._batch_size = batch_size
        self._timeout = timeout
        self._dim: int | None = None
        self._model: str | None = None
        self._lock = threading.Lock()

    def _post(self, texts: list[str]) -> dict:
        try:
            response = requests.post(
                self._url, json={"texts": texts}, timeout=self._timeout
            )
        except requests.RequestException as exc:
            raise EmbedTransportError(
                f"embed request failed for batch of {len(texts)} "
                f"(first: {texts[0]!r})" if texts else "embed probe failed"
            ) from exc
        if response.status_code != 200:
            detail = ""
            try:
                detail = response.json().get("error", "")
            except ValueError:
                pass
            raise EmbedProtocolError(
                f"status {response.status_code} for batch of {len(texts)}"
                + (f": {detail}" if detail else "")
            )
        try:
            doc = response.json()
        except ValueError:
            raise EmbedProtocolError("response is not JSON") from None
        if not isinstance(doc, dict) or "vectors" not in doc or "dim" not in doc \
                or "model" not in doc:
            raise EmbedProtocolError("response missing 'vectors', 'dim' or 'model'")
        if len(doc["vectors"]) != len(texts):
            raise EmbedProtocolError(
                f"server returned {len(doc['vectors'])} vectors for {len(texts)} texts"
            )
        for vec in doc["vectors"]:
            if len(vec) != doc["dim"]:
                raise EmbedProtocolError(
                    f"vector of length {len(vec)} does not match dim {doc['dim']}"
                )
        with self._lock:
            if self._dim is None:
                self._dim, self._model = int(doc["dim"]), str(doc["model"])
            elif self._dim != doc["dim"] or self._model != doc["model"]:
                raise EmbedProtocolError(
                    "server changed dim or model between batches"
                )
        return doc

    def _probe(self) -> None:
        if self._dim is None:
            self._post([])

    @property
    def dim(self) -> int:
        self._probe()
        return self._dim  # type: ignore[return-value]

    @property
    def provider_id(self) -> str:
        self._probe()
        return self._model  # type: ignore[return-value]

    def embed(self, phrases: Sequence[str]) -> list[Vector]:
        out: list[Vector] = []
        phrases = list(phrases)
        for start in range(0, len(phrases), self._batch_size):
            batch = phrases[start:start + self._batch_size]
            doc = self._post(batch)
            out.extend(tuple(float(x) for x in vec) for vec in doc["vectors"])
        return out


class DeterministicProvider(EmbeddingProvider):
    """Hash-seeded test double: no model, fully reproducible.

    Each token maps to a pseudo-random unit vector derived from (seed, token);
    a phrase vector is the mean of its token vectors, so token order does not
    matter and shared tokens pull phrases together.
    """

    def __init__(self, seed: int = 0, dim: int = 32):
        if dim < 2:
            raise ValueError(f"dim must be >= 2, got {dim}")
        self._seed = seed
        self._dim = dim
        self._token_cache: dict[str, Vector] = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def provider_id(self) -> str:
        return f"det:seed={self._seed},dim={self._dim}"

    def _token_vector(self, token: str) -> Vector:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self._seed}|{token}".encode("utf-8")).digest()
        rng = random.Random(int.from_bytes(digest, "big"))
        raw = [rng.gauss(0.0, 1.0) for _ in range(self._dim)]
        norm = math.sqrt(math.fsum(x * x for x in raw)) or 1.0
        vector = tuple(x / norm for x in raw)
        with self._lock:
            self._token_cache[token] = vector
        return vector

    def embed(self, phrases: Sequence[str]) -> list[Vector]:
        out = []
        for phrase in phrases:
            tokens = phrase.split() or [""]
            vectors = [self._token_vector(t) for t in tokens]
            out.append(tuple(
                math.fsum(v[i] for v in vectors) / len(vectors)
                for i in range(self._dim)
            ))
        return out


class CachedProvider(EmbeddingProvider):
    """Persistent cache layered over another provider.

    Hits come from the store file; misses go to the inner provider in one
    batch and the store is rewritten atomically afterwards. A store written
    by a different provider (or dimension) is refused, and a corrupt store is
    reported rather than silently rebuilt.
    """

    def __init__(self, inner: EmbeddingProvider, store_path: str):
        self._inner = inner
        self._path = store_path
        self._lock = threading.Lock()
        if os.path.exists(store_path):
            entries, dim, provider_id = read_store(store_path)
            if provider_id != inner.provider_id:
                raise ProviderMismatchError(
                    f"store at {store_path} was written by {provider_id!r}, "
                    f"inner provider is {inner.provider_id!r}"
                )
            if dim != inner.dim:
                raise ProviderMismatchError(
                    f"store dim {dim} does not match provider dim {inner.dim}"
                )
            self._entries = entries
        else:
            self._entries = {}

    @property
    def dim(self) -> int:
        return self._inner.dim

    @property
    def provider_id(self) -> str:
        return self._inner.provider_id

    def embed(self, phrases: Sequence[str]) -> list[Vector]:
        with self._lock:
            misses = []
            for phrase in phrases:
                if phrase not in self._entries and phrase not in misses:
                    misses.append(phrase)
            if misses:
                vectors = self._inner.embed(misses)
                self._entries.update(zip(misses, vectors))
                write_store(self._path, self._entries, self.dim, self.provider_id)
            return [self._entries[p] for p in phrases]


def provider_from_spec(spec: str) -> EmbeddingProvider:
    """Build a provider from the CLI flag grammar.

    file:<path> | http:<url> | det:seed=<s>,dim=<d>

    An http spec is the base URL itself, e.g. http://localhost:8000.
    """
    kind, _, rest = spec.partition(":")
    if kind == "file" and rest:
        return FileProvider.load(rest)
    if kind in ("http", "https") and rest:
        return HttpProvider(spec)
    if kind == "det":
        params = dict(item.split("=", 1) for item in rest.split(",") if "=" in item)
        try:
            return DeterministicProvider(
                seed=int(params.get("seed", "0")), dim=int(params.get("dim", "32"))
            )
        except ValueError as exc:
            raise ValueError(f"bad det provider spec {spec!r}: {exc}") from None
    raise ValueError(
        f"unknown embedding spec {spec!r} "
        "(expected file:<path>, http:<url>, or det:seed=<s>,dim=<d>)"
    )
