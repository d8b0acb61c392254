"""The ten-transfer poisoning scenario: one legitimate transfer and four phishing
variants for each of ETH and USDT, replayed against a victim account."""

from __future__ import annotations

from typing import Optional

from ..address import DEFAULT_LOOKALIKE, Address, LookalikeThresholds, is_lookalike, keccak256, similarity
from ..errors import NotLookalike
from ..ingest.logs import RawLog, encode_transfer_log
from ..transfers import (
    NATIVE,
    AccountHistory,
    LegitTokenRegistry,
    Token,
    TransferRecord,
    normalize_amount,
    registry_default,
)

VICTIM = Address.from_hex("0x71aF257EF2fA722694E1621B6f1D968c28Dd7A95")
BENIGN = Address.from_hex("0x46F0196EdBb29Bd3715E7F556c8633efDe1D0Dd9")
PHISHING = Address.from_hex("0x46F0042749ad2383471639b57833cd80bf1f0Dd9")

FAKE_USDT_CONTRACT = Address(keccak256(b"poisonguard/synthetic-fake-token/USDT")[12:])
FAKE_ETH_CONTRACT = Address(keccak256(b"poisonguard/synthetic-fake-token/ETH")[12:])

DEFAULT_BASE_BLOCK = 1_000_000
DEFAULT_STRIDE = 10

# (sender role, asset, human amount); asset is "ETH", "USDT", "fake-ETH" or "fake-USDT"
SCENARIO_ROWS = (
    ("benign", "ETH", "0.001"),
    ("phishing", "ETH", "0"),
    ("phishing", "ETH", "0.00001"),
    ("phishing", "fake-ETH", "0.001"),
    ("phishing", "fake-ETH", "0"),
    ("benign", "USDT", "10"),
    ("phishing", "USDT", "0"),
    ("phishing", "USDT", "0.01"),
    ("phishing", "fake-USDT", "10"),
    ("phishing", "fake-USDT", "0"),
)


def fake_token_metadata() -> dict:
    """Claimed (symbol, decimals) of the synthetic fake contracts."""
    return {FAKE_ETH_CONTRACT: ("ETH", 18), FAKE_USDT_CONTRACT: ("USDT", 6)}


def synthetic_hash(*fields) -> bytes:
    return keccak256("|".join(str(f) for f in fields).encode("utf-8"))


def build_scenario(victim: Address = VICTIM, benign: Address = BENIGN, phishing: Address = PHISHING,
                   registry: Optional[LegitTokenRegistry] = None,
                   thresholds: LookalikeThresholds = DEFAULT_LOOKALIKE,
                   base_block: int = DEFAULT_BASE_BLOCK, stride: int = DEFAULT_STRIDE) -> AccountHistory:
    if not is_lookalike(similarity(benign, phishing), thresholds):
        raise NotLookalike(
            f"{benign} and {phishing} do not share {thresholds.min_prefix}+{thresholds.min_suffix} hex digits"
        )
    if victim in (benign, phishing):
        raise ValueError("victim must differ from the benign and phishing addresses")
    registry = registry or registry_default()
    usdt = sorted(registry.lookup("USDT"))
    if not usdt:
        raise ValueError("registry has no USDT contract")
    listed = {c for cs in registry.entries.values() for c in cs}
    if FAKE_USDT_CONTRACT in listed or FAKE_ETH_CONTRACT in listed:
        raise ValueError("synthetic fake contracts must not be registry-listed")
    assets = {
        "ETH": NATIVE,
        "USDT": Token(usdt[0], "USDT", registry.decimals_of(usdt[0]) or 6),
        "fake-ETH": Token(FAKE_ETH_CONTRACT, "ETH", 18),
        "fake-USDT": Token(FAKE_USDT_CONTRACT, "USDT", 6),
    }
    senders = {"benign": benign, "phishing": phishing}
    records = []
    for n, (role, asset_name, human) in enumerate(SCENARIO_ROWS):
        asset = assets[asset_name]
        block = base_block + n * stride
        log_index = None if asset is NATIVE else 0
        amount = normalize_amount(human, asset.decimals)
        sender = senders[role]
        tx_hash = synthetic_hash(n + 1, block, log_index, sender.hex, victim.hex, asset_name, amount)
        records.append(TransferRecord(tx_hash, block, log_index, sender, victim, asset, amount))
    return AccountHistory(victim, tuple(records))


def fake_transfer_event(contract: Address, sender: Address, recipient: Address, amount: int,
                        block: int = 0, log_index: int = 0,
                        tx_hash: Optional[bytes] = None) -> RawLog:
    """Transfer log from a permissive token that lets anyone name any sender and amount."""
    if tx_hash is None:
        tx_hash = synthetic_hash("fake", contract.hex, sender.hex, recipient.hex, amount, block, log_index)
    return encode_transfer_log(contract, sender, recipient, amount, tx_hash, block, log_index)


def shipped_scenario_path():
    """Path of the packaged fixture produced by ``build_scenario()`` with defaults."""
    from importlib import resources
    return resources.files("poisonguard").joinpath("data", "scenario.json")
