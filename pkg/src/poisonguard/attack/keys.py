"""secp256k1 key pairs and a seedable counter-mode key stream.

Seeded streams are reproducible by design and therefore insecure; use them
for tests and simulations only, never for keys that will hold funds.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from typing import Optional

from coincurve import PublicKey

from ..address import Address, keccak256

SECP256K1_ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141

_DOMAIN = b"poisonguard/keystream/v1"


def pubkey_bytes(secret: bytes) -> bytes:
    """64-byte uncompressed public key x||y."""
    return PublicKey.from_valid_secret(secret).format(compressed=False)[1:]


def address_raw(secret: bytes) -> bytes:
    return keccak256(pubkey_bytes(secret))[12:]


@dataclass(frozen=True)
class KeyPair:
    secret: bytes
    address: Address

    def __post_init__(self):
        k = int.from_bytes(self.secret, "big")
        if len(self.secret) != 32 or not 1 <= k < SECP256K1_ORDER:
            raise ValueError("secret must be a 32-byte scalar in [1, n-1]")

    @classmethod
    def from_secret(cls, secret: bytes) -> "KeyPair":
        return cls(secret, Address(address_raw(secret)))

    @property
    def secret_hex(self) -> str:
        return "0x" + self.secret.hex()

    def __repr__(self) -> str:
        # never print the secret by accident
        return f"KeyPair(address={self.address.checksum})"


class KeyStream:
    """Deterministic sequence of valid secrets indexed by a counter.

    Candidate ``i`` is ``sha256(domain || seed || i || retry)`` with ``retry``
    bumped until the value is a valid scalar, so any worker can compute any
    index and results do not depend on how indices are split among workers.
    """

    def __init__(self, seed: Optional[int] = None):
        if seed is None:
            seed = secrets.randbits(256)
        if not 0 <= seed < 2**256:
            raise ValueError("seed must fit in 256 bits")
        self.seed = seed
        self._prefix = _DOMAIN + seed.to_bytes(32, "big")

    def secret_at(self, index: int) -> bytes:
        retry = 0
        while True:
            digest = hashlib.sha256(
                self._prefix + index.to_bytes(8, "big") + retry.to_bytes(4, "big")
            ).digest()
            if 1 <= int.from_bytes(digest, "big") < SECP256K1_ORDER:
                return digest
            retry += 1

    def keypair_at(self, index: int) -> KeyPair:
        return KeyPair.from_secret(self.secret_at(index))
