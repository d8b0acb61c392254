"""Look-alike address search: targeted vanity search and birthday-style pair search.

Both searches walk a :class:`KeyStream` by index. Work is split into
contiguous index chunks, one per worker process; the reported hit is the
lowest qualifying index, so results are identical for any worker count
given the same seed.
"""

from __future__ import annotations

import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from ..address import HEX_LEN, Address, LookalikeThresholds, SimilarityScore, is_lookalike, similarity
from .keys import KeyPair, KeyStream, address_raw

BATCH = 4096
_CHECK_EVERY = 256
_NO_HIT = 2**62

_shared_best = None


@dataclass(frozen=True)
class SearchStats:
    candidates_tried: int
    elapsed: float

    @property
    def throughput(self) -> float:
        return self.candidates_tried / self.elapsed if self.elapsed > 0 else float("inf")

    def to_json(self) -> dict:
        return {
            "candidatesTried": self.candidates_tried,
            "elapsedSeconds": round(self.elapsed, 6),
            "throughput": round(self.throughput, 1) if self.elapsed > 0 else None,
        }


def _init_worker(shared):
    global _shared_best
    _shared_best = shared


def _scan_targeted(seed: int, start: int, stop: int, target_hex: str,
                   min_prefix: int, min_suffix: int) -> tuple[Optional[int], int]:
    """Scan indices [start, stop); return (first hit or None, keccak invocations)."""
    stream = KeyStream(seed)
    want_head = target_hex[:min_prefix]
    want_tail = target_hex[HEX_LEN - min_suffix:] if min_suffix else ""
    tried = 0
    for i in range(start, stop):
        if _shared_best is not None and tried % _CHECK_EVERY == 0 and _shared_best.value < start:
            break
        h = address_raw(stream.secret_at(i)).hex()
        tried += 1
        if h.startswith(want_head) and h.endswith(want_tail) and h != target_hex:
            if _shared_best is not None:
                with _shared_best.get_lock():
                    if i < _shared_best.value:
                        _shared_best.value = i
            return i, tried
    return None, tried


def _chunks(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    size = -(-(stop - start) // parts)
    return [(a, min(a + size, stop)) for a in range(start, stop, size)]


def _executor(workers: int, shared=None) -> ProcessPoolExecutor:
    ctx = multiprocessing.get_context("fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn")
    return ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                               initializer=_init_worker, initargs=(shared,))


def targeted_search(target: Address, min_prefix: int, min_suffix: int, budget: int,
                    seed: Optional[int] = None, workers: int = 1,
                    batch: int = BATCH) -> tuple[Optional[KeyPair], SearchStats]:
    """Find a key whose address shares ``min_prefix``/``min_suffix`` hex digits with ``target``.

    Returns ``(None, stats)`` once ``budget`` candidates are exhausted.
    """
    if min_prefix + min_suffix > HEX_LEN:
        raise ValueError("min_prefix + min_suffix must not exceed 40")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    stream = KeyStream(seed)
    target_hex = target.hex
    t0 = time.perf_counter()
    tried = 0
    hit = None
    if workers <= 1:
        start = 0
        while start < budget and hit is None:
            stop = min(start + batch, budget)
            hit, n = _scan_targeted(stream.seed, start, stop, target_hex, min_prefix, min_suffix)
            tried += n
            start = stop
    else:
        shared = multiprocessing.get_context().Value("q", _NO_HIT)
        with _executor(workers, shared) as pool:
            start = 0
            while start < budget and hit is None:
                stop = min(start + batch * workers, budget)
                futures = [pool.submit(_scan_targeted, stream.seed, a, b, target_hex, min_prefix, min_suffix)
                           for a, b in _chunks(start, stop, workers)]
                results = [f.result() for f in futures]
                tried += sum(n for _, n in results)
                hits = [h for h, _ in results if h is not None]
                hit = min(hits) if hits else None
                start = stop
    stats = SearchStats(tried, time.perf_counter() - t0)
    if hit is None:
        return None, stats
    return stream.keypair_at(hit), stats


def _gen_addresses(seed: int, start: int, stop: int) -> list[bytes]:
    stream = KeyStream(seed)
    return [address_raw(stream.secret_at(i)) for i in range(start, stop)]


def generate_addresses(n: int, seed: Optional[int] = None, workers: int = 1) -> tuple[KeyStream, list[bytes]]:
    """Raw addresses for stream indices 0..n-1, in index order."""
    stream = KeyStream(seed)
    if workers <= 1 or n < 2 * BATCH:
        return stream, _gen_addresses(stream.seed, 0, n)
    out: list[bytes] = []
    with _executor(workers) as pool:
        futures = [pool.submit(_gen_addresses, stream.seed, a, b) for a, b in _chunks(0, n, workers * 4)]
        for f in futures:
            out.extend(f.result())
    return stream, out


def index_pairs(addresses: list[bytes], thresholds: LookalikeThresholds) -> list[tuple[int, int]]:
    """Index pairs (i < j) that are look-alikes, found via a prefix+suffix bucket map."""
    p, s = thresholds.min_prefix, thresholds.min_suffix
    buckets: dict[tuple[str, str], list[int]] = {}
    hexes = [a.hex() for a in addresses]
    for i, h in enumerate(hexes):
        buckets.setdefault((h[:p], h[HEX_LEN - s:] if s else ""), []).append(i)
    pairs = []
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i, j in combinations(members, 2):
            if hexes[i] != hexes[j]:
                pairs.append((i, j))
    pairs.sort()
    return pairs


def pair_search(n: int, min_prefix: int, min_suffix: int, seed: Optional[int] = None,
                workers: int = 1) -> list[tuple[tuple[KeyPair, KeyPair], SimilarityScore]]:
    """Generate ``n`` keys and return every unordered look-alike pair among them."""
    if n < 2:
        raise ValueError("pair search needs at least two keys")
    thresholds = LookalikeThresholds(min_prefix, min_suffix)
    stream, addresses = generate_addresses(n, seed, workers)
    out = []
    for i, j in index_pairs(addresses, thresholds):
        a, b = Address(addresses[i]), Address(addresses[j])
        score = similarity(a, b)
        if not is_lookalike(score, thresholds):
            raise AssertionError("bucket index produced a non-look-alike pair")
        out.append(((KeyPair(stream.secret_at(i), a), KeyPair(stream.secret_at(j), b)), score))
    return out
