"""Classify transfers and match suspicious senders to look-alike counterparties."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .address import (
    DEFAULT_LOOKALIKE,
    Address,
    LookalikeThresholds,
    SimilarityScore,
    is_lookalike,
    similarity,
)
from .transfers import AccountHistory, LegitTokenRegistry, Token, TransferRecord


class TransferClass(str, Enum):
    LEGIT_NATIVE = "LegitNative"
    LEGIT_TOKEN = "LegitToken"
    ZERO_VALUE = "ZeroValue"
    DUST_VALUE = "DustValue"
    FAKE_TOKEN = "FakeToken"
    FAKE_TOKEN_ZERO = "FakeTokenZero"

    @property
    def is_legit(self) -> bool:
        return self in (TransferClass.LEGIT_NATIVE, TransferClass.LEGIT_TOKEN)

    @property
    def is_fake(self) -> bool:
        return self in (TransferClass.FAKE_TOKEN, TransferClass.FAKE_TOKEN_ZERO)


SUSPICIOUS_CLASSES = frozenset(c for c in TransferClass if not c.is_legit)


class MatchWindow(str, Enum):
    PAST_ONLY = "PastOnly"
    PAST_AND_FUTURE = "PastAndFuture"


def _default_dust() -> dict:
    return {"ETH": 10**14, "USDT": 10**5}


@dataclass(frozen=True)
class DetectorConfig:
    """Dust thresholds are keyed by uppercase symbol and compared with ``<=``."""

    dust_thresholds: Mapping[str, int] = field(default_factory=_default_dust)
    lookalike: LookalikeThresholds = DEFAULT_LOOKALIKE
    match_window: MatchWindow = MatchWindow.PAST_ONLY

    def __post_init__(self):
        norm = {}
        for sym, value in self.dust_thresholds.items():
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ValueError(f"dust threshold for {sym} must be a positive integer")
            norm[sym.upper()] = value
        object.__setattr__(self, "dust_thresholds", norm)

    def dust_threshold(self, symbol: str) -> Optional[int]:
        return self.dust_thresholds.get(symbol.upper())


DEFAULT_CONFIG = DetectorConfig()


def asset_symbol(t: TransferRecord, registry: LegitTokenRegistry) -> str:
    """Symbol the transfer presents to the user (claimed symbol for tokens)."""
    return t.asset.symbol.upper() if isinstance(t.asset, Token) else registry.native_symbol.upper()


def classify_transfer(t: TransferRecord, registry: LegitTokenRegistry,
                      cfg: DetectorConfig = DEFAULT_CONFIG) -> TransferClass:
    asset = t.asset
    if isinstance(asset, Token) and registry.knows_symbol(asset.symbol):
        if asset.contract not in registry.lookup(asset.symbol):
            return TransferClass.FAKE_TOKEN_ZERO if t.amount == 0 else TransferClass.FAKE_TOKEN
    if t.amount == 0:
        return TransferClass.ZERO_VALUE
    threshold = cfg.dust_threshold(asset_symbol(t, registry))
    if threshold is not None and t.amount <= threshold:
        return TransferClass.DUST_VALUE
    return TransferClass.LEGIT_TOKEN if isinstance(asset, Token) else TransferClass.LEGIT_NATIVE


@dataclass(frozen=True)
class Verdict:
    record: TransferRecord
    cls: TransferClass
    incoming: bool
    symbol: str
    matched_counterparty: Optional[Address] = None
    score: Optional[SimilarityScore] = None
    phishing: bool = False

    @property
    def counterparty(self) -> Address:
        return self.record.sender if self.incoming else self.record.recipient

    def to_json(self) -> dict:
        out = {
            "hash": self.record.hash_hex,
            "logIndex": self.record.log_index,
            "class": self.cls.value,
            "symbol": self.symbol,
            "incoming": self.incoming,
            "phishing": self.phishing,
            "matchedCounterparty": None,
            "prefixMatch": None,
            "suffixMatch": None,
        }
        if self.matched_counterparty is not None:
            out["matchedCounterparty"] = self.matched_counterparty.checksum
            out["prefixMatch"] = self.score.prefix_match
            out["suffixMatch"] = self.score.suffix_match
        return out


def _legit_counterparties(history: AccountHistory, registry, cfg) -> dict[Address, int]:
    """Counterparty -> first block of a legitimate-class transfer with it."""
    first: dict[Address, int] = {}
    for t in history.transfers:
        if not classify_transfer(t, registry, cfg).is_legit:
            continue
        other = t.recipient if t.sender == history.owner else t.sender
        if other == history.owner:
            continue
        if other not in first or t.block < first[other]:
            first[other] = t.block
    return first


def _best_match(suspect: Address, candidates: dict[Address, int], at_block: int,
                cfg: DetectorConfig) -> Optional[tuple[Address, SimilarityScore]]:
    best = None
    best_key = None
    for addr, block in candidates.items():
        if cfg.match_window is MatchWindow.PAST_ONLY and block >= at_block:
            continue
        score = similarity(suspect, addr)
        if not is_lookalike(score, cfg.lookalike):
            continue
        key = (-score.total, block, addr.raw)
        if best_key is None or key < best_key:
            best, best_key = (addr, score), key
    return best


def match_lookalike(suspect: Address, history: AccountHistory, at_block: int,
                    registry: LegitTokenRegistry,
                    cfg: DetectorConfig = DEFAULT_CONFIG) -> Optional[tuple[Address, SimilarityScore]]:
    """Legitimate counterparty most similar to ``suspect``.

    Ties go to the counterparty seen earliest, then to the lower address.
    """
    return _best_match(suspect, _legit_counterparties(history, registry, cfg), at_block, cfg)


def analyze_history(history: AccountHistory, registry: LegitTokenRegistry,
                    cfg: DetectorConfig = DEFAULT_CONFIG) -> list[Verdict]:
    candidates = _legit_counterparties(history, registry, cfg)
    verdicts = []
    for t in history.transfers:
        incoming = history.is_incoming(t)
        symbol = asset_symbol(t, registry)
        cls = classify_transfer(t, registry, cfg)
        if not incoming:
            passthrough = TransferClass.LEGIT_TOKEN if isinstance(t.asset, Token) else TransferClass.LEGIT_NATIVE
            verdicts.append(Verdict(t, passthrough, False, symbol))
            continue
        if cls.is_legit:
            verdicts.append(Verdict(t, cls, True, symbol))
            continue
        match = _best_match(t.sender, candidates, t.block, cfg)
        phishing = cls.is_fake or match is not None
        verdicts.append(Verdict(t, cls, True, symbol,
                                match[0] if match else None,
                                match[1] if match else None,
                                phishing))
    return verdicts


def verdict_report(verdicts: Sequence[Verdict]) -> list[dict]:
    return [v.to_json() for v in verdicts]


__all__ = [
    "DEFAULT_CONFIG",
    "DetectorConfig",
    "MatchWindow",
    "SUSPICIOUS_CLASSES",
    "TransferClass",
    "Verdict",
    "analyze_history",
    "asset_symbol",
    "classify_transfer",
    "match_lookalike",
    "verdict_report",
]
