"""Symmetric sealing and password-based key derivation.

The construction is a SHA-256 XOR keystream with a truncated SHA-256 tag.
It is deterministic and dependency-free so that simulation runs are
bit-reproducible. It is NOT production cryptography; ``seal``/``open_blob``
are the place to swap in a vetted AEAD.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrityFailure, InvalidInput

KEY_LEN = 32
NONCE_LEN = 16
TAG_LEN = 16
U32_MAX = 0xFFFF_FFFF

_KDF_LABEL = b"kdf-v1"


def fingerprint(key_bytes: bytes) -> int:
    """Default key id: the first four key bytes read big-endian."""
    return int.from_bytes(key_bytes[:4], "big")


@dataclass(frozen=True)
class SecretKey:
    key_id: int
    bytes: bytes = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.bytes) != KEY_LEN:
            raise InvalidInput(f"key must be {KEY_LEN} bytes, got {len(self.bytes)}")
        if not 0 <= self.key_id <= U32_MAX:
            raise InvalidInput(f"key_id out of u32 range: {self.key_id}")

    @classmethod
    def from_bytes(cls, key_bytes: bytes) -> SecretKey:
        return cls(fingerprint(key_bytes), bytes(key_bytes))


@dataclass(frozen=True)
class SealedBlob:
    key_id: int
    nonce: bytes
    ciphertext: bytes
    tag: bytes

    def __post_init__(self) -> None:
        if len(self.nonce) != NONCE_LEN:
            raise InvalidInput(f"nonce must be {NONCE_LEN} bytes")
        if len(self.tag) != TAG_LEN:
            raise InvalidInput(f"tag must be {TAG_LEN} bytes")


def _len_prefixed(text: str) -> bytes:
    raw = text.encode("utf-8")
    return len(raw).to_bytes(4, "big") + raw


def derive_key(password: str, principal_name: str, realm: str,
               key_id: int | None = None) -> SecretKey:
    """Derive a principal's long-term key from its password.

    When ``key_id`` is omitted the key's fingerprint is used, so client and
    KDC derive identical keys independently.
    """
    if not password:
        raise InvalidInput("password must be non-empty")
    digest = hashlib.sha256(
        _KDF_LABEL + _len_prefixed(realm) + _len_prefixed(principal_name)
        + _len_prefixed(password)
    ).digest()
    return SecretKey(fingerprint(digest) if key_id is None else key_id, digest)


def _keystream(key: bytes, nonce: bytes, length: int) -> bytes:
    blocks = []
    for i in range((length + 31) // 32):
        blocks.append(hashlib.sha256(key + nonce + i.to_bytes(8, "big")).digest())
    return b"".join(blocks)[:length]


def _xor(data: bytes, stream: bytes) -> bytes:
    n = len(data)
    return (int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")).to_bytes(n, "big")


def _tag(key: bytes, nonce: bytes, ciphertext: bytes) -> bytes:
    return hashlib.sha256(key + nonce + ciphertext).digest()[:TAG_LEN]


def seal(plaintext: bytes, key: SecretKey, nonce: bytes) -> SealedBlob:
    if len(nonce) != NONCE_LEN:
        raise InvalidInput(f"nonce must be {NONCE_LEN} bytes")
    stream = _keystream(key.bytes, nonce, len(plaintext))
    ciphertext = _xor(plaintext, stream)
    return SealedBlob(key.key_id, bytes(nonce), ciphertext, _tag(key.bytes, nonce, ciphertext))


def open_blob(blob: SealedBlob, key: SecretKey) -> bytes:
    """Return the plaintext of ``blob`` or raise :class:`IntegrityFailure`."""
    expected = _tag(key.bytes, blob.nonce, blob.ciphertext)
    # key_id is outside the tag, so it is checked separately
    if blob.key_id != key.key_id or not hmac.compare_digest(expected, blob.tag):
        raise IntegrityFailure("sealed blob failed verification")
    stream = _keystream(key.bytes, blob.nonce, len(blob.ciphertext))
    return _xor(blob.ciphertext, stream)


def random_session_key(rng: np.random.Generator) -> SecretKey:
    return SecretKey.from_bytes(rng.bytes(KEY_LEN))


def random_nonce(rng: np.random.Generator) -> bytes:
    return rng.bytes(NONCE_LEN)
