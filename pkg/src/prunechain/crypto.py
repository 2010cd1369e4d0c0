"""Ed25519 keys and signatures.

Keys are plain byte strings (32-byte seed / 32-byte public key) so they can be
stored in chain files and compared directly.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import lru_cache

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat


@dataclass(frozen=True)
class KeyPair:
    public: bytes
    secret: bytes

    @classmethod
    def from_secret(cls, secret: bytes) -> "KeyPair":
        sk = Ed25519PrivateKey.from_private_bytes(secret)
        public = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
        return cls(public=public, secret=bytes(secret))

    @classmethod
    def generate(cls) -> "KeyPair":
        return cls.from_secret(os.urandom(32))

    @classmethod
    def derive(cls, seed: int | bytes, label: str) -> "KeyPair":
        """Deterministic key for a (seed, label) pair; used by tests and the simulator."""
        if isinstance(seed, int):
            seed = seed.to_bytes(8, "big", signed=False)
        return cls.from_secret(hashlib.sha256(b"prunechain-key" + seed + label.encode()).digest())

    def sign(self, message: bytes) -> bytes:
        return sign(self.secret, message)


@lru_cache(maxsize=256)
def _private(secret: bytes) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(secret)


def sign(secret: bytes, message: bytes) -> bytes:
    return _private(secret).sign(message)


@lru_cache(maxsize=1 << 16)
def verify(public: bytes, message: bytes, signature: bytes) -> bool:
    # Cached: chains are re-verified after every operation and entries are immutable.
    try:
        Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
    except (InvalidSignature, ValueError):
        return False
    return True
