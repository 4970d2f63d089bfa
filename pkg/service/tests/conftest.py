import hashlib
import struct

import pytest
from fastapi.testclient import TestClient

from embed_service import create_app


class FakeModel:
    """Deterministic stand-in: vectors derived from a hash of the text, so no
    network or model weights are needed to exercise the protocol."""

    model_id = "fake-hash-model"
    dim = 6

    def encode(self, texts):
        vectors = []
        for text in texts:
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            values = struct.unpack(">6I", digest[:24])
            vectors.append([v / 2**32 - 0.5 for v in values])
        return vectors


@pytest.fixture
def model():
    return FakeModel()


@pytest.fixture
def client(model):
    return TestClient(create_app(model, max_batch_size=8))
