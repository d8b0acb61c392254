"""Transfers, asset identity and the registry of legitimate token contracts."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .address import Address
from .errors import DuplicateRecord, MalformedNumber, PrecisionLoss, SchemaError

NATIVE_DECIMALS = 18
MAX_TOKEN_DECIMALS = 77
USDT_CONTRACT = Address.from_hex("0xdAC17F958D2ee523a2206206994597C13D831ec7")

_NUMERAL_RE = re.compile(r"(\d+)(?:\.(\d*))?")


@dataclass(frozen=True)
class Native:
    """The chain's native coin. Always 18 decimals."""

    decimals = NATIVE_DECIMALS


@dataclass(frozen=True)
class Token:
    contract: Address
    symbol: str
    decimals: int = 18

    def __post_init__(self):
        if not 0 <= self.decimals <= MAX_TOKEN_DECIMALS:
            raise ValueError(f"token decimals out of range: {self.decimals}")


NATIVE = Native()
AssetKind = Union[Native, Token]


@dataclass(frozen=True)
class TransferRecord:
    tx_hash: bytes
    block: int
    log_index: Optional[int]
    sender: Address
    recipient: Address
    asset: AssetKind
    amount: int

    def __post_init__(self):
        if len(self.tx_hash) != 32:
            raise ValueError("tx_hash must be 32 bytes")
        if isinstance(self.amount, bool) or not isinstance(self.amount, int) or self.amount < 0:
            raise ValueError(f"amount must be a non-negative integer, got {self.amount!r}")
        if self.block < 0:
            raise ValueError("block must be non-negative")
        if isinstance(self.asset, Native):
            if self.log_index is not None:
                raise ValueError("native transfers carry no log index")
        elif self.log_index is None or self.log_index < 0:
            raise ValueError("token transfers need a non-negative log index")

    @property
    def key(self) -> tuple[bytes, Optional[int]]:
        return (self.tx_hash, self.log_index)

    @property
    def hash_hex(self) -> str:
        return "0x" + self.tx_hash.hex()

    @property
    def is_native(self) -> bool:
        return isinstance(self.asset, Native)

    def sort_key(self) -> tuple:
        return (self.block, -1 if self.log_index is None else self.log_index, self.tx_hash)


@dataclass(frozen=True)
class LegitTokenRegistry:
    entries: Mapping[str, frozenset]
    decimals: Mapping[Address, int] = field(default_factory=dict)
    native_symbol: str = "ETH"

    def __post_init__(self):
        seen: dict[Address, str] = {}
        for symbol, contracts in self.entries.items():
            if symbol != symbol.upper():
                raise ValueError(f"registry symbols must be uppercase: {symbol!r}")
            if symbol == self.native_symbol.upper():
                raise ValueError(f"native symbol {symbol!r} cannot be a token symbol")
            for c in contracts:
                if c in seen:
                    raise ValueError(f"contract {c} listed under {seen[c]} and {symbol}")
                seen[c] = symbol

    def lookup(self, symbol: str) -> frozenset:
        return self.entries.get(symbol.upper(), frozenset())

    def symbol_of(self, contract: Address) -> Optional[str]:
        for symbol, contracts in self.entries.items():
            if contract in contracts:
                return symbol
        return None

    def decimals_of(self, contract: Address) -> Optional[int]:
        return self.decimals.get(contract)

    def knows_symbol(self, symbol: str) -> bool:
        s = symbol.upper()
        return s in self.entries or s == self.native_symbol.upper()

    def extended(self, tokens: Iterable[tuple[str, Address, int]]) -> "LegitTokenRegistry":
        entries = {k: set(v) for k, v in self.entries.items()}
        decimals = dict(self.decimals)
        for symbol, contract, dec in tokens:
            entries.setdefault(symbol.upper(), set()).add(contract)
            decimals[contract] = dec
        return LegitTokenRegistry(
            {k: frozenset(v) for k, v in entries.items()}, decimals, self.native_symbol
        )


def registry_default() -> LegitTokenRegistry:
    return LegitTokenRegistry(
        {"USDT": frozenset({USDT_CONTRACT})}, {USDT_CONTRACT: 6}, "ETH"
    )


def registry_from_json(doc: dict, base: Optional[LegitTokenRegistry] = None) -> LegitTokenRegistry:
    """Build a registry from ``{"tokens": [...], "native": "ETH"}``.

    Entries are added on top of ``base`` when given.
    """
    if not isinstance(doc, dict):
        raise SchemaError("registry must be a JSON object")
    native = doc.get("native", base.native_symbol if base else "ETH")
    if not isinstance(native, str) or not native:
        raise SchemaError("native must be a non-empty string", "/native")
    tokens = []
    for i, tok in enumerate(doc.get("tokens", [])):
        ptr = f"/tokens/{i}"
        try:
            tokens.append((tok["symbol"], Address.from_hex(tok["contract"]), int(tok.get("decimals", 18))))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad token entry: {exc}", ptr) from None
    start = base or LegitTokenRegistry({}, {}, native)
    start = LegitTokenRegistry(start.entries, start.decimals, native)
    try:
        return start.extended(tokens)
    except ValueError as exc:
        raise SchemaError(str(exc), "/tokens") from None


def load_registry(path: Union[str, Path], extend_default: bool = True) -> LegitTokenRegistry:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return registry_from_json(doc, registry_default() if extend_default else None)


def normalize_amount(raw: str, decimals: int) -> int:
    """Convert a human decimal numeral to integer base units, exactly."""
    if not isinstance(raw, str):
        raise MalformedNumber(f"expected a decimal string, got {raw!r}")
    m = _NUMERAL_RE.fullmatch(raw.strip())
    if not m:
        raise MalformedNumber(f"not a non-negative decimal numeral: {raw!r}")
    whole, frac = m.group(1), m.group(2) or ""
    if len(frac.rstrip("0")) > decimals:
        raise PrecisionLoss(f"{raw!r} has more than {decimals} fractional digits")
    frac = frac[:decimals].ljust(decimals, "0")
    return int(whole) * 10**decimals + (int(frac) if frac else 0)


def render_amount(amount: int, decimals: int) -> str:
    """Inverse of :func:`normalize_amount`; trailing fractional zeros are dropped."""
    if amount < 0:
        raise ValueError("amount must be non-negative")
    if decimals == 0:
        return str(amount)
    whole, frac = divmod(amount, 10**decimals)
    frac_s = str(frac).rjust(decimals, "0").rstrip("0")
    return f"{whole}.{frac_s}" if frac_s else str(whole)


@dataclass(frozen=True)
class AccountHistory:
    owner: Address
    transfers: tuple

    def __post_init__(self):
        ordered = tuple(sorted(self.transfers, key=TransferRecord.sort_key))
        object.__setattr__(self, "transfers", ordered)
        seen = set()
        for t in ordered:
            if t.key in seen:
                raise DuplicateRecord(f"duplicate record {t.hash_hex} log index {t.log_index}")
            seen.add(t.key)
            if self.owner not in (t.sender, t.recipient):
                raise ValueError(f"transfer {t.hash_hex} does not involve owner {self.owner}")

    def __len__(self) -> int:
        return len(self.transfers)

    def __iter__(self):
        return iter(self.transfers)

    def is_incoming(self, t: TransferRecord) -> bool:
        return t.recipient == self.owner and t.sender != self.owner
