"""Pre-send recipient verification."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .address import (
    DEFAULT_LOOKALIKE,
    Address,
    LookalikeThresholds,
    is_lookalike,
    parse_address,
    shorten,
    similarity,
)
from .detector import Verdict
from .errors import MalformedHex

logger = logging.getLogger(__name__)

# 90 days of 12-second blocks
DEFAULT_STALENESS_BLOCKS = 90 * 24 * 60 * 60 // 12


class WarningLevel(IntEnum):
    """Ordered severity; the value doubles as the ``check`` exit code."""

    CLEAR = 0
    REMINDER = 1
    CONFIRMATION_REQUIRED = 2
    ALERT = 3


@dataclass(frozen=True)
class FlagList:
    addresses: frozenset
    source: str = "local"
    rejected: tuple = field(default=(), compare=False)

    def __contains__(self, addr: Address) -> bool:
        return addr in self.addresses

    def __len__(self) -> int:
        return len(self.addresses)


def parse_flaglist(text: str, source: str = "local") -> FlagList:
    """One address per line; ``#`` starts a comment. Bad lines are kept in ``rejected``."""
    found = set()
    rejected = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        try:
            found.add(parse_address(entry).address)
        except MalformedHex as exc:
            rejected.append((lineno, str(exc)))
    for lineno, msg in rejected:
        logger.warning("%s line %d: %s", source, lineno, msg)
    return FlagList(frozenset(found), source, tuple(rejected))


def load_flaglist(path: Union[str, Path], source: Optional[str] = None) -> FlagList:
    with open(path, encoding="utf-8") as fh:
        return parse_flaglist(fh.read(), source or str(path))


@dataclass(frozen=True)
class GuardConfig:
    lookalike: LookalikeThresholds = DEFAULT_LOOKALIKE
    staleness_blocks: int = DEFAULT_STALENESS_BLOCKS
    # Defaults to the newest block among the verdicts.
    current_block: Optional[int] = None


REASON_PHISHING_SENDER = "sender of detected phishing transfers"
REASON_UNKNOWN = "unknown address"


def check_recipient(recipient: Address, flags: Sequence[FlagList], verdicts: Sequence[Verdict],
                    contacts: Iterable[Address], cfg: GuardConfig = GuardConfig(),
                    owner: Optional[Address] = None) -> tuple[WarningLevel, list]:
    """Highest warning level that applies to sending funds to ``recipient``.

    Flag-list hits and senders of detected phishing transfers raise an Alert.
    Contacts (and the owner) are otherwise Clear. Non-contacts get
    ConfirmationRequired when they were never a legitimate counterparty or
    resemble a contact or counterparty, and a Reminder when the last
    legitimate interaction is older than the staleness window.
    """
    contacts = set(contacts)
    if owner is not None:
        contacts.add(owner)
    level = WarningLevel.CLEAR
    reasons: list = []

    for fl in flags:
        if recipient in fl:
            level = WarningLevel.ALERT
            reasons.append(f"flagged by {fl.source}")
    if any(v.phishing and v.incoming and v.record.sender == recipient for v in verdicts):
        level = WarningLevel.ALERT
        reasons.append(REASON_PHISHING_SENDER)

    if recipient in contacts:
        return level, reasons

    last_seen: dict[Address, int] = {}
    for v in verdicts:
        if v.cls.is_legit:
            cp = v.counterparty
            last_seen[cp] = max(last_seen.get(cp, -1), v.record.block)

    known = contacts | set(last_seen)
    for other in sorted(known - {recipient}):
        if is_lookalike(similarity(recipient, other), cfg.lookalike):
            level = max(level, WarningLevel.CONFIRMATION_REQUIRED)
            reasons.append(f"look-alike of {shorten(other).text} ({other.checksum})")

    if recipient not in last_seen:
        level = max(level, WarningLevel.CONFIRMATION_REQUIRED)
        reasons.append(REASON_UNKNOWN)
    else:
        now = cfg.current_block
        if now is None:
            now = max((v.record.block for v in verdicts), default=0)
        if now - last_seen[recipient] > cfg.staleness_blocks:
            level = max(level, WarningLevel.REMINDER)
            reasons.append("not a contact; last legitimate interaction is stale")
    return level, reasons
