"""Score what a wallet displays against ground-truth verdicts.

Usability counts which legitimate assets have a visible transfer (0-2).
Risk is decided top-down:

    4  every phishing group (zero / dust / fake, per asset) has a Shown transfer
    3  a non-zero fake transfer is Shown
    2  a zero-value transfer is Shown, or a fake is shown conditionally or flagged
       (a Shown zero-amount fake alone counts as conditional)
    1  a dust transfer is Shown
    0  otherwise
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .detector import TransferClass, Verdict
from .feed import DisplayState
from .ingest.etherscan import ProviderDiagnosis

logger = logging.getLogger(__name__)

LEGIT, ZERO, DUST, FAKE = "legit", "zero", "dust", "fake"

_GROUP = {
    TransferClass.LEGIT_NATIVE: LEGIT,
    TransferClass.LEGIT_TOKEN: LEGIT,
    TransferClass.ZERO_VALUE: ZERO,
    TransferClass.DUST_VALUE: DUST,
    TransferClass.FAKE_TOKEN: FAKE,
    TransferClass.FAKE_TOKEN_ZERO: FAKE,
}

_CONDITIONAL = (DisplayState.SHOWN_CONDITIONAL, DisplayState.FLAGGED)


def class_group(cls: TransferClass) -> str:
    return _GROUP[cls]


def _state(visible: Mapping, v: Verdict) -> DisplayState:
    return visible.get(v.record.key, DisplayState.HIDDEN)


def _evidence_item(v: Verdict, state: DisplayState) -> dict:
    return {
        "hash": v.record.hash_hex,
        "logIndex": v.record.log_index,
        "class": v.cls.value,
        "symbol": v.symbol,
        "state": state.value,
    }


def score_usability(visible: Mapping, ground_truth: Sequence[Verdict]) -> int:
    shown = set()
    for v in ground_truth:
        if v.cls.is_legit and v.incoming and _state(visible, v).visible:
            shown.add(v.cls)
    return len(shown & {TransferClass.LEGIT_NATIVE, TransferClass.LEGIT_TOKEN})


def _risk_with_evidence(visible: Mapping, ground_truth: Sequence[Verdict]) -> tuple[int, dict]:
    suspicious = [v for v in ground_truth if v.incoming and not v.cls.is_legit]
    evidence: dict[int, list] = {1: [], 2: [], 3: [], 4: []}

    groups: dict[tuple[str, str], list] = {}
    for v in suspicious:
        groups.setdefault((class_group(v.cls), v.symbol), []).append(v)

    def group_shown(members):
        nonzero_fakes = [m for m in members if m.cls is TransferClass.FAKE_TOKEN]
        pool = nonzero_fakes or members
        return [m for m in pool if _state(visible, m) is DisplayState.SHOWN]

    all_shown = bool(groups)
    for members in groups.values():
        hits = group_shown(members)
        if not hits:
            all_shown = False
        evidence[4].extend(hits)

    for v in suspicious:
        st = _state(visible, v)
        if v.cls is TransferClass.FAKE_TOKEN and st is DisplayState.SHOWN:
            evidence[3].append(v)
        elif v.cls is TransferClass.ZERO_VALUE and st is DisplayState.SHOWN:
            evidence[2].append(v)
        elif v.cls.is_fake and (st in _CONDITIONAL or st is DisplayState.SHOWN):
            evidence[2].append(v)
        elif v.cls is TransferClass.DUST_VALUE and st is DisplayState.SHOWN:
            evidence[1].append(v)

    if all_shown:
        level = 4
    else:
        evidence[4] = []
        level = next((lvl for lvl in (3, 2, 1) if evidence[lvl]), 0)
    return level, {lvl: [_evidence_item(v, _state(visible, v)) for v in items]
                   for lvl, items in evidence.items() if items and lvl <= level}


def score_risk(visible: Mapping, ground_truth: Sequence[Verdict]) -> int:
    return _risk_with_evidence(visible, ground_truth)[0]


class FilterOrigin(str, Enum):
    PROVIDER = "Provider"
    WALLET = "Wallet"
    NOT_FILTERED = "NotFiltered"
    INDETERMINATE = "Indeterminate"


def attribute_filtering(ground_truth: Sequence[Verdict], provider_view: Optional[Iterable],
                        displayed: Mapping) -> dict:
    """Who removed each ground-truth transfer from the user's view.

    ``provider_view`` holds the (hash, logIndex) keys the provider returned,
    or ``None`` when its response is unavailable. Anything short of a plain
    Shown state (hidden, flagged, conditional) counts as filtered.
    """
    truth_keys = {v.record.key for v in ground_truth}
    view = None if provider_view is None else set(provider_view)
    if view is not None and view - truth_keys:
        logger.warning("ignoring %d provider records not in ground truth", len(view - truth_keys))
    out = {}
    for v in ground_truth:
        key = v.record.key
        if view is None:
            out[key] = FilterOrigin.INDETERMINATE
        elif key not in view:
            out[key] = FilterOrigin.PROVIDER
        elif displayed.get(key, DisplayState.HIDDEN) is DisplayState.SHOWN:
            out[key] = FilterOrigin.NOT_FILTERED
        else:
            out[key] = FilterOrigin.WALLET
    return out


_DIAGNOSIS_TEXT = {
    ProviderDiagnosis.OK: "provider responded with data; fault is wallet-side",
    ProviderDiagnosis.NOT_FOUND: "provider endpoint not found (HTTP 404)",
    ProviderDiagnosis.FORBIDDEN: "provider rejected request (HTTP 403)",
    ProviderDiagnosis.EMPTY_BODY: "provider returned empty payload (HTTP 200)",
    ProviderDiagnosis.REJECTED_REQUEST: "provider reported an error in the request (HTTP 200)",
    ProviderDiagnosis.TIMEOUT: "provider did not respond in time",
    ProviderDiagnosis.MALFORMED_PAYLOAD: "provider returned a payload that could not be parsed",
}


def diagnose_zero_usability(probe: ProviderDiagnosis) -> str:
    return _DIAGNOSIS_TEXT[ProviderDiagnosis(probe)]


@dataclass
class ScoreCard:
    usability: int
    risk: int
    usability_evidence: list = field(default_factory=list)
    risk_evidence: dict = field(default_factory=dict)
    attribution: Optional[dict] = None
    diagnosis: Optional[str] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        evidence = []
        if self.usability_evidence:
            evidence.append({"kind": "usability", "level": self.usability,
                             "transfers": self.usability_evidence})
        for lvl, items in sorted(self.risk_evidence.items(), reverse=True):
            evidence.append({"kind": "risk", "level": lvl, "transfers": items})
        doc = {
            "usability": self.usability,
            "risk": self.risk,
            "evidence": evidence,
            "attribution": {
                f"0x{h.hex()}" + ("" if li is None else f":{li}"): origin.value
                for (h, li), origin in (self.attribution or {}).items()
            },
        }
        if self.diagnosis is not None:
            doc["diagnosis"] = self.diagnosis
        if self.notes:
            doc["notes"] = list(self.notes)
        return doc


def score(visible: Mapping, ground_truth: Sequence[Verdict], provider_view: Optional[Iterable] = None,
          probe: Optional[ProviderDiagnosis] = None) -> ScoreCard:
    """Full score card. A wallet that shows no legitimate transfer scores risk 0."""
    usability = score_usability(visible, ground_truth)
    risk, risk_evidence = 0, {}
    if usability > 0:
        risk, risk_evidence = _risk_with_evidence(visible, ground_truth)
    legit_shown = [_evidence_item(v, _state(visible, v)) for v in ground_truth
                   if v.cls.is_legit and v.incoming and _state(visible, v).visible]
    card = ScoreCard(usability, risk, legit_shown, risk_evidence)
    if provider_view is not None:
        card.attribution = attribute_filtering(ground_truth, provider_view, visible)
    if usability == 0 and probe is not None:
        card.diagnosis = diagnose_zero_usability(probe)
    return card


def visibility_from_marks(ground_truth: Sequence[Verdict], marks: Mapping) -> dict:
    """Expand a check-mark grid into per-transfer states.

    ``marks`` maps (group, symbol), e.g. ("zero", "USDT"), to a DisplayState;
    every transfer in that cell gets the state. Cells not listed are Hidden.
    """
    out = {}
    for v in ground_truth:
        if not v.incoming:
            continue
        out[v.record.key] = marks.get((class_group(v.cls), v.symbol), DisplayState.HIDDEN)
    return out
