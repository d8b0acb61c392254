"""Render an account's activity feed under an entry design and a filter policy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .address import Address, parse_address, shorten
from .detector import TransferClass, Verdict
from .errors import MalformedHex, MismatchedVerdicts, SchemaError
from .transfers import AccountHistory

ALL_ENTRY = "all"
FAKE_SUFFIX = "?"


class EntryDesign(str, Enum):
    ONE_PER_COIN = "OnePerCoin"
    ONE_FOR_ALL = "OneForAll"
    HYBRID = "Hybrid"


class DisplayState(str, Enum):
    HIDDEN = "Hidden"
    FLAGGED = "Flagged"
    SHOWN_CONDITIONAL = "ShownConditional"
    SHOWN = "Shown"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @property
    def visible(self) -> bool:
        return self is not DisplayState.HIDDEN


_RANK = {
    DisplayState.HIDDEN: 0,
    DisplayState.FLAGGED: 1,
    DisplayState.SHOWN_CONDITIONAL: 2,
    DisplayState.SHOWN: 3,
}


class Action(str, Enum):
    HIDE = "Hide"
    FLAG = "Flag"
    SHOW = "Show"
    SHOW_CONDITIONAL = "ShowConditional"


_ACTION_STATE = {
    Action.HIDE: DisplayState.HIDDEN,
    Action.FLAG: DisplayState.FLAGGED,
    Action.SHOW: DisplayState.SHOWN,
    Action.SHOW_CONDITIONAL: DisplayState.SHOWN_CONDITIONAL,
}


@dataclass(frozen=True)
class FilterPolicy:
    """Per-class display action. Legitimate classes are always shown."""

    actions: Mapping[TransferClass, Action] = field(default_factory=dict)

    def __post_init__(self):
        full = {c: Action.SHOW for c in TransferClass}
        for cls, action in self.actions.items():
            cls, action = TransferClass(cls), Action(action)
            if cls.is_legit and action is not Action.SHOW:
                raise ValueError(f"{cls.value} transfers must always be shown")
            full[cls] = action
        object.__setattr__(self, "actions", full)

    def state_for(self, cls: TransferClass) -> DisplayState:
        return _ACTION_STATE[self.actions[cls]]

    @classmethod
    def uniform(cls, action: Action) -> "FilterPolicy":
        return cls({c: action for c in TransferClass if not c.is_legit})

    @classmethod
    def ideal(cls) -> "FilterPolicy":
        return cls.uniform(Action.FLAG)

    @classmethod
    def show_all(cls) -> "FilterPolicy":
        return cls.uniform(Action.SHOW)

    @classmethod
    def hide_all(cls) -> "FilterPolicy":
        return cls.uniform(Action.HIDE)


@dataclass(frozen=True)
class FeedRow:
    tx_hash: bytes
    log_index: Optional[int]
    state: DisplayState
    from_short: str
    to_short: str
    amount: str
    symbol: str

    @property
    def key(self) -> tuple:
        return (self.tx_hash, self.log_index)

    def to_json(self) -> dict:
        return {
            "hash": "0x" + self.tx_hash.hex(),
            "logIndex": self.log_index,
            "state": self.state.value,
            "fromShort": self.from_short,
            "toShort": self.to_short,
            "amount": self.amount,
            "symbol": self.symbol,
        }


@dataclass(frozen=True)
class FeedSnapshot:
    design: EntryDesign
    entries: Mapping[str, tuple]
    owner: Optional[Address] = None

    def to_json(self) -> dict:
        doc = {
            "design": self.design.value,
            "entries": {name: [r.to_json() for r in rows] for name, rows in self.entries.items()},
        }
        if self.owner is not None:
            doc["owner"] = self.owner.checksum
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "FeedSnapshot":
        if not isinstance(doc, dict):
            raise SchemaError("feed snapshot must be a JSON object")
        try:
            design = EntryDesign(doc.get("design"))
        except ValueError:
            raise SchemaError(f"unknown design {doc.get('design')!r}", "/design") from None
        raw_entries = doc.get("entries", {})
        if not isinstance(raw_entries, dict):
            raise SchemaError("entries must be an object", "/entries")
        entries = {}
        for name, rows in raw_entries.items():
            if not isinstance(rows, list):
                raise SchemaError("entry must be an array", f"/entries/{name}")
            entries[name] = tuple(_row_from_json(r, f"/entries/{name}/{i}") for i, r in enumerate(rows))
        owner = None
        if doc.get("owner"):
            try:
                owner = parse_address(doc["owner"]).address
            except MalformedHex as exc:
                raise SchemaError(str(exc), "/owner") from None
        return cls(design, entries, owner)


def _row_from_json(doc, ptr: str) -> FeedRow:
    if not isinstance(doc, dict):
        raise SchemaError("row must be an object", ptr)
    h = doc.get("hash")
    if not isinstance(h, str) or len(h) != 66 or not h.startswith("0x"):
        raise SchemaError("hash must be 0x + 64 hex digits", ptr + "/hash")
    try:
        tx_hash = bytes.fromhex(h[2:])
    except ValueError:
        raise SchemaError("hash must be 0x + 64 hex digits", ptr + "/hash") from None
    log_index = doc.get("logIndex")
    if log_index is not None and (not isinstance(log_index, int) or log_index < 0):
        raise SchemaError("logIndex must be a non-negative integer or null", ptr + "/logIndex")
    try:
        state = DisplayState(doc.get("state", DisplayState.SHOWN.value))
    except ValueError:
        raise SchemaError(f"unknown state {doc.get('state')!r}", ptr + "/state") from None
    return FeedRow(tx_hash, log_index, state, str(doc.get("fromShort", "")),
                   str(doc.get("toShort", "")), str(doc.get("amount", "")), str(doc.get("symbol", "")))


def load_snapshot(path: Union[str, Path]) -> FeedSnapshot:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    return FeedSnapshot.from_json(doc)


def coin_entry_name(v: Verdict) -> str:
    return v.symbol + FAKE_SUFFIX if v.cls.is_fake else v.symbol


def render_feed(history: AccountHistory, verdicts: Sequence[Verdict], design: EntryDesign,
                policy: FilterPolicy, short: tuple[int, int] = (4, 4),
                tracked: Optional[Iterable[str]] = None) -> FeedSnapshot:
    """Build the feed a wallet with this design and policy would display.

    ``tracked`` limits per-coin entries to the named entries (e.g. ``{"ETH",
    "USDT"}``); transfers of untracked coins appear in no per-coin entry.
    """
    by_key = {v.record.key: v for v in verdicts}
    if len(by_key) != len(verdicts) or set(by_key) != {t.key for t in history.transfers}:
        raise MismatchedVerdicts("verdicts do not correspond one-to-one to the history's transfers")
    tracked = None if tracked is None else set(tracked)
    newest_first = sorted(history.transfers, key=lambda t: t.sort_key(), reverse=True)
    entries: dict[str, list] = {}
    if design in (EntryDesign.ONE_FOR_ALL, EntryDesign.HYBRID):
        entries[ALL_ENTRY] = []
    for t in newest_first:
        v = by_key[t.key]
        row = FeedRow(t.tx_hash, t.log_index, policy.state_for(v.cls),
                      shorten(t.sender, *short).text, shorten(t.recipient, *short).text,
                      str(t.amount), v.symbol)
        if ALL_ENTRY in entries:
            entries[ALL_ENTRY].append(row)
        if design in (EntryDesign.ONE_PER_COIN, EntryDesign.HYBRID):
            name = coin_entry_name(v)
            if tracked is None or name in tracked:
                entries.setdefault(name, []).append(row)
    if not history.transfers:
        entries = {}
    return FeedSnapshot(design, {k: tuple(v) for k, v in entries.items()}, history.owner)


def displayed_union(snapshot: FeedSnapshot) -> dict:
    """Most-visible state of each transfer across all entries, keyed by (hash, logIndex)."""
    out: dict = {}
    for rows in snapshot.entries.values():
        for row in rows:
            prev = out.get(row.key)
            if prev is None or row.state.rank > prev.rank:
                out[row.key] = row.state
    return out


def visible_keys(union: Mapping) -> set:
    return {k for k, state in union.items() if state.visible}
