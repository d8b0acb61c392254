"""Read and write account histories in the JSON fixture format."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional, Union

import jsonschema

from ..address import Address, parse_address
from ..errors import DuplicateRecord, MalformedHex, SchemaError
from ..transfers import (
    NATIVE,
    AccountHistory,
    LegitTokenRegistry,
    Token,
    TransferRecord,
    registry_default,
)
from .logs import DEFAULT_DECIMALS, UNKNOWN_SYMBOL

logger = logging.getLogger(__name__)

_HEX40 = "^0[xX][0-9a-fA-F]{40}$"
_HEX64 = "^0[xX][0-9a-fA-F]{64}$"

FIXTURE_SCHEMA = {
    "type": "object",
    "required": ["address", "transfers"],
    "properties": {
        "address": {"type": "string", "pattern": _HEX40},
        "transfers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "hash", "block", "from", "to", "amount"],
                "properties": {
                    "kind": {"enum": ["native", "token"]},
                    "hash": {"type": "string", "pattern": _HEX64},
                    "block": {"type": "integer", "minimum": 0},
                    "logIndex": {"type": ["integer", "null"], "minimum": 0},
                    "from": {"type": "string", "pattern": _HEX40},
                    "to": {"type": "string", "pattern": _HEX40},
                    "amount": {"type": "string", "pattern": "^[0-9]+$"},
                    "contract": {"type": "string", "pattern": _HEX40},
                    "symbol": {"type": "string"},
                    "decimals": {"type": "integer", "minimum": 0, "maximum": 77},
                },
                "allOf": [
                    {
                        "if": {"properties": {"kind": {"const": "token"}}},
                        "then": {"required": ["contract", "logIndex"],
                                 "properties": {"logIndex": {"type": "integer"}}},
                    },
                    {
                        "if": {"properties": {"kind": {"const": "native"}}},
                        "then": {"not": {"required": ["contract"]},
                                 "properties": {"logIndex": {"type": "null"}}},
                    },
                ],
            },
        },
    },
}


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _addr(text: str, ptr: str) -> Address:
    try:
        parsed = parse_address(text)
    except MalformedHex as exc:
        raise SchemaError(str(exc), ptr) from None
    if parsed.bad_checksum:
        logger.warning("%s: address %s fails its checksum", ptr, text)
    return parsed.address


def history_from_json(doc: dict, registry: Optional[LegitTokenRegistry] = None) -> AccountHistory:
    validator = jsonschema.Draft202012Validator(FIXTURE_SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if err is not None:
        raise SchemaError(err.message, _pointer(err.absolute_path))
    registry = registry or registry_default()
    owner = _addr(doc["address"], "/address")
    records = []
    seen = {}
    for i, item in enumerate(doc["transfers"]):
        ptr = f"/transfers/{i}"
        if item["kind"] == "native":
            asset = NATIVE
            log_index = None
        else:
            contract = _addr(item["contract"], ptr + "/contract")
            symbol = item.get("symbol") or registry.symbol_of(contract) or UNKNOWN_SYMBOL
            decimals = item.get("decimals")
            if decimals is None:
                decimals = registry.decimals_of(contract)
            if decimals is None:
                logger.warning("%s: decimals unknown, assuming %d", ptr, DEFAULT_DECIMALS)
                decimals = DEFAULT_DECIMALS
            asset = Token(contract, symbol, decimals)
            log_index = item["logIndex"]
        record = TransferRecord(
            tx_hash=bytes.fromhex(item["hash"][2:]),
            block=item["block"],
            log_index=log_index,
            sender=_addr(item["from"], ptr + "/from"),
            recipient=_addr(item["to"], ptr + "/to"),
            asset=asset,
            amount=int(item["amount"]),
        )
        if owner not in (record.sender, record.recipient):
            raise SchemaError("transfer does not involve the fixture address", ptr)
        if record.key in seen:
            raise DuplicateRecord(
                f"{ptr} duplicates {seen[record.key]} ({record.hash_hex}, logIndex {log_index})"
            )
        seen[record.key] = ptr
        records.append(record)
    return AccountHistory(owner, tuple(records))


def record_to_json(t: TransferRecord) -> dict:
    out = {
        "kind": "native" if t.is_native else "token",
        "hash": t.hash_hex,
        "block": t.block,
        "logIndex": t.log_index,
        "from": t.sender.checksum,
        "to": t.recipient.checksum,
        "amount": str(t.amount),
    }
    if not t.is_native:
        out.update(contract=t.asset.contract.checksum, symbol=t.asset.symbol,
                   decimals=t.asset.decimals)
    return out


def history_to_json(history: AccountHistory) -> dict:
    return {
        "address": history.owner.checksum,
        "transfers": [record_to_json(t) for t in history.transfers],
    }


def load_fixture(path: Union[str, Path], registry: Optional[LegitTokenRegistry] = None) -> AccountHistory:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return history_from_json(doc, registry)


def save_fixture(history: AccountHistory, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(history_to_json(history), fh, indent=2)
        fh.write("\n")
