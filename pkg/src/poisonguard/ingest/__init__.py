"""Acquire account histories from fixtures, Etherscan-style APIs and raw logs."""

from .etherscan import (
    EtherscanClient,
    FetchResult,
    ProbeReport,
    ProviderDiagnosis,
    classify_response,
    fetch_history,
)
from .fixtures import history_from_json, history_to_json, load_fixture, save_fixture
from .logs import TRANSFER_TOPIC, RawLog, decode_transfer_log, encode_transfer_log

__all__ = [
    "EtherscanClient",
    "FetchResult",
    "ProbeReport",
    "ProviderDiagnosis",
    "RawLog",
    "TRANSFER_TOPIC",
    "classify_response",
    "decode_transfer_log",
    "encode_transfer_log",
    "fetch_history",
    "history_from_json",
    "history_to_json",
    "load_fixture",
    "save_fixture",
]
