"""Etherscan-compatible history client with provider fault diagnosis.

Remote faults never raise. Each probe is classified into a
:class:`ProviderDiagnosis` from the HTTP status and body alone, and a
failed fetch yields an empty history together with the diagnosis.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional
from urllib.parse import urlparse

import requests

from ..address import Address, parse_address
from ..errors import InvalidEndpoint, MalformedHex
from ..transfers import NATIVE, AccountHistory, LegitTokenRegistry, Token, TransferRecord, registry_default
from .logs import DEFAULT_DECIMALS, UNKNOWN_SYMBOL

logger = logging.getLogger(__name__)

MAX_RECORDS = 10_000


class ProviderDiagnosis(str, Enum):
    OK = "Ok"
    NOT_FOUND = "NotFound"
    FORBIDDEN = "Forbidden"
    EMPTY_BODY = "EmptyBody"
    REJECTED_REQUEST = "RejectedRequest"
    TIMEOUT = "Timeout"
    MALFORMED_PAYLOAD = "MalformedPayload"


@dataclass(frozen=True)
class ProbeReport:
    endpoint: str
    http_status: Optional[int]
    diagnosis: ProviderDiagnosis
    body_bytes: int

    def to_json(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "httpStatus": self.http_status,
            "diagnosis": self.diagnosis.value,
            "bodyBytes": self.body_bytes,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProbeReport":
        return cls(doc["endpoint"], doc.get("httpStatus"),
                   ProviderDiagnosis(doc["diagnosis"]), int(doc.get("bodyBytes", 0)))


def classify_response(status: int, body: bytes) -> tuple[ProviderDiagnosis, Optional[list]]:
    """Map one HTTP response to a diagnosis and, when Ok, its result rows."""
    if status == 404:
        return ProviderDiagnosis.NOT_FOUND, None
    if status in (401, 403):
        return ProviderDiagnosis.FORBIDDEN, None
    if status != 200:
        return ProviderDiagnosis.MALFORMED_PAYLOAD, None
    text = body.decode("utf-8", errors="replace").strip()
    if not text:
        return ProviderDiagnosis.EMPTY_BODY, None
    try:
        doc = json.loads(text)
    except ValueError:
        return ProviderDiagnosis.MALFORMED_PAYLOAD, None
    if doc in ({}, [], None, ""):
        return ProviderDiagnosis.EMPTY_BODY, None
    if not isinstance(doc, dict):
        return ProviderDiagnosis.MALFORMED_PAYLOAD, None
    if "error" in doc:
        # JSON-RPC style error envelope, e.g. an invalid API key
        return ProviderDiagnosis.REJECTED_REQUEST, None
    if "result" not in doc:
        return ProviderDiagnosis.MALFORMED_PAYLOAD, None
    result = doc["result"]
    if isinstance(result, str):
        return ProviderDiagnosis.REJECTED_REQUEST, None
    if result is None:
        return ProviderDiagnosis.EMPTY_BODY, None
    if not isinstance(result, list):
        return ProviderDiagnosis.MALFORMED_PAYLOAD, None
    return ProviderDiagnosis.OK, result


@dataclass
class FetchResult:
    history: AccountHistory
    diagnosis: ProviderDiagnosis
    probes: list = field(default_factory=list)
    truncated: dict = field(default_factory=dict)

    @property
    def probe(self) -> Optional[ProbeReport]:
        """The failing probe, or the last one when everything succeeded."""
        for p in self.probes:
            if p.diagnosis is not ProviderDiagnosis.OK:
                return p
        return self.probes[-1] if self.probes else None


def check_endpoint(endpoint: str) -> str:
    parts = urlparse(endpoint)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise InvalidEndpoint(f"not an http(s) URL: {endpoint!r}")
    return endpoint


class _BadRow(ValueError):
    pass


def _row_addr(value) -> Address:
    try:
        return parse_address(value).address
    except (MalformedHex, TypeError) as exc:
        raise _BadRow(str(exc)) from None


def _row_int(value) -> int:
    try:
        return int(value, 0) if isinstance(value, str) and value.startswith("0x") else int(value)
    except (TypeError, ValueError) as exc:
        raise _BadRow(str(exc)) from None


def _row_hash(value) -> bytes:
    if not isinstance(value, str) or not value.startswith("0x") or len(value) != 66:
        raise _BadRow(f"bad tx hash {value!r}")
    try:
        return bytes.fromhex(value[2:])
    except ValueError as exc:
        raise _BadRow(str(exc)) from None


def parse_native_row(row: dict, owner: Address) -> Optional[TransferRecord]:
    if not isinstance(row, dict):
        raise _BadRow("row is not an object")
    if not row.get("to") or str(row.get("isError", "0")) == "1":
        return None
    sender, recipient = _row_addr(row.get("from")), _row_addr(row.get("to"))
    if owner not in (sender, recipient):
        return None
    return TransferRecord(_row_hash(row.get("hash")), _row_int(row.get("blockNumber")), None,
                          sender, recipient, NATIVE, _row_int(row.get("value")))


def parse_token_row(row: dict, owner: Address, registry: LegitTokenRegistry) -> Optional[TransferRecord]:
    if not isinstance(row, dict):
        raise _BadRow("row is not an object")
    sender, recipient = _row_addr(row.get("from")), _row_addr(row.get("to"))
    if owner not in (sender, recipient):
        return None
    contract = _row_addr(row.get("contractAddress"))
    symbol = row.get("tokenSymbol") or registry.symbol_of(contract) or UNKNOWN_SYMBOL
    raw_dec = row.get("tokenDecimal")
    if raw_dec not in (None, ""):
        decimals = _row_int(raw_dec)
    else:
        decimals = registry.decimals_of(contract)
        if decimals is None:
            logger.warning("decimals unknown for %s, assuming %d", contract, DEFAULT_DECIMALS)
            decimals = DEFAULT_DECIMALS
    try:
        asset = Token(contract, str(symbol), decimals)
    except ValueError as exc:
        raise _BadRow(str(exc)) from None
    return TransferRecord(_row_hash(row.get("hash")), _row_int(row.get("blockNumber")),
                          _row_int(row.get("logIndex")), sender, recipient, asset,
                          _row_int(row.get("value")))


class EtherscanClient:
    """Sequential ``txlist`` + ``tokentx`` fetcher.

    Only timeouts are retried (``max_retries`` times, exponential backoff
    starting at ``backoff`` seconds). ``sleep`` is injectable for tests.
    """

    def __init__(self, session: Optional[requests.Session] = None, timeout: float = 10.0,
                 page_size: int = 1000, max_records: int = MAX_RECORDS, max_retries: int = 2,
                 backoff: float = 0.5, sleep: Callable[[float], None] = time.sleep):
        self.session = session or requests.Session()
        self.timeout = timeout
        self.page_size = page_size
        self.max_records = max_records
        self.max_retries = max_retries
        self.backoff = backoff
        self.sleep = sleep

    def probe(self, endpoint: str, params: dict) -> tuple[ProbeReport, Optional[list]]:
        attempt = 0
        while True:
            try:
                resp = self.session.get(endpoint, params=params, timeout=self.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                logger.info("probe %s failed: %s", endpoint, exc)
                if attempt < self.max_retries:
                    self.sleep(self.backoff * 2**attempt)
                    attempt += 1
                    continue
                return ProbeReport(endpoint, None, ProviderDiagnosis.TIMEOUT, 0), None
            except requests.RequestException as exc:
                logger.info("probe %s failed: %s", endpoint, exc)
                return ProbeReport(endpoint, None, ProviderDiagnosis.MALFORMED_PAYLOAD, 0), None
            diagnosis, rows = classify_response(resp.status_code, resp.content)
            return ProbeReport(endpoint, resp.status_code, diagnosis, len(resp.content)), rows

    def _paginate(self, endpoint, action, owner, api_key, probes) -> tuple[ProviderDiagnosis, list, bool]:
        rows: list = []
        page = 1
        while True:
            params = {"module": "account", "action": action, "address": owner.checksum,
                      "sort": "asc", "page": page, "offset": self.page_size}
            if api_key:
                params["apikey"] = api_key
            report, batch = self.probe(endpoint, params)
            probes.append(report)
            if report.diagnosis is not ProviderDiagnosis.OK:
                return report.diagnosis, [], False
            rows.extend(batch)
            if len(rows) >= self.max_records:
                truncated = len(batch) == self.page_size
                return ProviderDiagnosis.OK, rows[: self.max_records], truncated
            if len(batch) < self.page_size:
                return ProviderDiagnosis.OK, rows, False
            page += 1

    def fetch_history(self, endpoint: str, api_key: Optional[str], owner: Address,
                      registry: Optional[LegitTokenRegistry] = None) -> FetchResult:
        check_endpoint(endpoint)
        registry = registry or registry_default()
        empty = AccountHistory(owner, ())
        probes: list = []
        truncated = {}
        records: dict = {}
        for action in ("txlist", "tokentx"):
            diagnosis, rows, cut = self._paginate(endpoint, action, owner, api_key, probes)
            if diagnosis is not ProviderDiagnosis.OK:
                return FetchResult(empty, diagnosis, probes, {})
            truncated[action] = cut
            try:
                for row in rows:
                    rec = (parse_native_row(row, owner) if action == "txlist"
                           else parse_token_row(row, owner, registry))
                    if rec is not None:
                        records.setdefault(rec.key, rec)
            except _BadRow as exc:
                logger.warning("malformed %s row from %s: %s", action, endpoint, exc)
                probes.append(ProbeReport(endpoint, probes[-1].http_status,
                                          ProviderDiagnosis.MALFORMED_PAYLOAD, probes[-1].body_bytes))
                return FetchResult(empty, ProviderDiagnosis.MALFORMED_PAYLOAD, probes, {})
        return FetchResult(AccountHistory(owner, tuple(records.values())), ProviderDiagnosis.OK,
                           probes, truncated)


def fetch_history(endpoint: str, api_key: Optional[str], owner: Address,
                  registry: Optional[LegitTokenRegistry] = None,
                  client: Optional[EtherscanClient] = None) -> FetchResult:
    return (client or EtherscanClient()).fetch_history(endpoint, api_key, owner, registry)


def fetch_text(url: str, session: Optional[requests.Session] = None, timeout: float = 10.0) -> str:
    """Plain GET for remote flag lists. Raises on HTTP errors."""
    check_endpoint(url)
    resp = (session or requests.Session()).get(url, timeout=timeout)
    resp.raise_for_status()
    return resp.text
