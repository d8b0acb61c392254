"""20-byte account addresses: parsing, EIP-55 rendering, shortening and similarity."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from Crypto.Hash import keccak

from .errors import BadChecksum, LengthOverflow, MalformedHex

HEX_LEN = 40
ELLIPSIS = "..."

_HEX_RE = re.compile(r"[0-9a-fA-F]{40}")


def keccak256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


@dataclass(frozen=True, order=True)
class Address:
    """An account identifier. Compares and hashes by its raw bytes."""

    raw: bytes

    def __post_init__(self):
        if not isinstance(self.raw, (bytes, bytearray)) or len(self.raw) != 20:
            raise MalformedHex(f"address must be 20 bytes, got {self.raw!r}")
        if isinstance(self.raw, bytearray):
            object.__setattr__(self, "raw", bytes(self.raw))

    @classmethod
    def from_hex(cls, text: str) -> "Address":
        """Lenient parse that ignores checksum casing entirely."""
        return parse_address(text).address

    @property
    def hex(self) -> str:
        """Lowercase hex digits without the ``0x`` prefix."""
        return self.raw.hex()

    @property
    def checksum(self) -> str:
        return checksum_encode(self)

    def __str__(self) -> str:
        return checksum_encode(self)

    def __repr__(self) -> str:
        return f"Address('{checksum_encode(self)}')"


ZERO_ADDRESS = Address(bytes(20))


class ParsedAddress(NamedTuple):
    address: Address
    bad_checksum: bool


def parse_address(text: str, strict: bool = False) -> ParsedAddress:
    """Parse a 40-digit hex address, with or without ``0x``.

    All-lowercase and all-uppercase inputs carry no checksum and are always
    accepted. Mixed-case input that fails EIP-55 is accepted with
    ``bad_checksum=True`` unless ``strict`` is set, in which case
    :class:`BadChecksum` is raised.
    """
    if not isinstance(text, str):
        raise MalformedHex(f"expected a hex string, got {type(text).__name__}")
    digits = text[2:] if text[:2] in ("0x", "0X") else text
    if len(digits) != HEX_LEN or not _HEX_RE.fullmatch(digits):
        raise MalformedHex(f"not a 40-digit hex address: {text!r}")
    addr = Address(bytes.fromhex(digits))
    mixed = digits != digits.lower() and digits != digits.upper()
    bad = mixed and _checksum_digits(addr.raw) != digits
    if bad and strict:
        raise BadChecksum(f"EIP-55 checksum mismatch: {text!r}")
    return ParsedAddress(addr, bad)


@lru_cache(maxsize=65536)
def _checksum_digits(raw: bytes) -> str:
    lower = raw.hex()
    digest = keccak256(lower.encode("ascii")).hex()
    return "".join(
        c.upper() if int(h, 16) >= 8 else c for c, h in zip(lower, digest)
    )


def checksum_encode(addr: Address) -> str:
    """EIP-55 mixed-case rendering with ``0x`` prefix."""
    return "0x" + _checksum_digits(addr.raw)


@dataclass(frozen=True)
class ShortForm:
    prefix_len: int
    suffix_len: int
    text: str


def shorten(addr: Address, prefix_len: int = 4, suffix_len: int = 4) -> ShortForm:
    if prefix_len < 0 or suffix_len < 0:
        raise ValueError("prefix and suffix lengths must be non-negative")
    if prefix_len + suffix_len > HEX_LEN:
        raise LengthOverflow(
            f"prefix {prefix_len} + suffix {suffix_len} exceeds {HEX_LEN} hex digits"
        )
    digits = _checksum_digits(addr.raw)
    if prefix_len + suffix_len == HEX_LEN:
        text = "0x" + digits
    else:
        tail = digits[HEX_LEN - suffix_len:] if suffix_len else ""
        text = "0x" + digits[:prefix_len] + ELLIPSIS + tail
    return ShortForm(prefix_len, suffix_len, text)


class SimilarityScore(NamedTuple):
    prefix_match: int
    suffix_match: int

    @property
    def total(self) -> int:
        return self.prefix_match + self.suffix_match


@dataclass(frozen=True)
class LookalikeThresholds:
    min_prefix: int = 4
    min_suffix: int = 4

    def __post_init__(self):
        if self.min_prefix < 0 or self.min_suffix < 0:
            raise ValueError("look-alike thresholds must be non-negative")
        if self.min_prefix > HEX_LEN or self.min_suffix > HEX_LEN:
            raise ValueError("look-alike thresholds cannot exceed 40")


DEFAULT_LOOKALIKE = LookalikeThresholds()


def common_prefix_len(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def similarity(a: Address, b: Address) -> SimilarityScore:
    """Longest common hex prefix and suffix, case-insensitive."""
    ha, hb = a.raw.hex(), b.raw.hex()
    if ha == hb:
        return SimilarityScore(HEX_LEN, HEX_LEN)
    return SimilarityScore(common_prefix_len(ha, hb), common_prefix_len(ha[::-1], hb[::-1]))


def is_lookalike(score: SimilarityScore, policy: LookalikeThresholds = DEFAULT_LOOKALIKE) -> bool:
    # (40, 40) only arises for byte-equal addresses.
    if score.prefix_match == HEX_LEN and score.suffix_match == HEX_LEN:
        return False
    return score.prefix_match >= policy.min_prefix and score.suffix_match >= policy.min_suffix
