"""Address-poisoning simulation, detection and wallet feed scoring."""

from .address import (
    Address,
    LookalikeThresholds,
    SimilarityScore,
    checksum_encode,
    is_lookalike,
    parse_address,
    shorten,
    similarity,
)
from .detector import DetectorConfig, TransferClass, Verdict, analyze_history, classify_transfer
from .transfers import AccountHistory, LegitTokenRegistry, TransferRecord, registry_default

__version__ = "0.1.0"

__all__ = [
    "AccountHistory",
    "Address",
    "DetectorConfig",
    "LegitTokenRegistry",
    "LookalikeThresholds",
    "SimilarityScore",
    "TransferClass",
    "TransferRecord",
    "Verdict",
    "analyze_history",
    "checksum_encode",
    "classify_transfer",
    "is_lookalike",
    "parse_address",
    "registry_default",
    "shorten",
    "similarity",
]
