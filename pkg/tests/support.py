"""Shared test helpers: a stub Etherscan-style server and table fixtures."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from poisonguard.evaluator import visibility_from_marks
from poisonguard.feed import DisplayState
from poisonguard.transfers import Token

DATA = Path(__file__).parent / "data"

MARK_STATE = {"Y": DisplayState.SHOWN, "N": DisplayState.HIDDEN, "C": DisplayState.SHOWN_CONDITIONAL}
COLUMNS = ("legit", "zero", "dust", "fake")
CODE_GROUP = {"Z": "zero", "D": "dust", "F": "fake"}
CODE_ASSET = {"E": "ETH", "U": "USDT"}


def load_table(name: str) -> dict:
    return json.loads((DATA / name).read_text())


def row_marks(row: dict) -> dict:
    cond = DisplayState(row.get("conditional_state", DisplayState.SHOWN_CONDITIONAL.value))
    marks = {}
    for asset in ("ETH", "USDT"):
        for col, ch in zip(COLUMNS, row[asset]):
            marks[(col, asset)] = cond if ch == "C" else MARK_STATE[ch]
    return marks


def row_visibility(verdicts, row: dict) -> dict:
    return visibility_from_marks(verdicts, row_marks(row))


def code_of(verdict) -> str:
    """Two-letter transfer code, e.g. ZE = zero-value ETH, FU = fake USDT."""
    from poisonguard.evaluator import class_group
    group = class_group(verdict.cls)
    letter = {v: k for k, v in CODE_GROUP.items()}.get(group, "L")
    return letter + {"ETH": "E", "USDT": "U"}[verdict.symbol]


# --- Etherscan-compatible rows ------------------------------------------------------

def native_row(t) -> dict:
    return {"blockNumber": str(t.block), "hash": t.hash_hex, "from": "0x" + t.sender.hex,
            "to": "0x" + t.recipient.hex, "value": str(t.amount), "isError": "0"}


def token_row(t) -> dict:
    return {"blockNumber": str(t.block), "hash": t.hash_hex, "logIndex": str(t.log_index),
            "from": "0x" + t.sender.hex, "to": "0x" + t.recipient.hex, "value": str(t.amount),
            "contractAddress": "0x" + t.asset.contract.hex, "tokenSymbol": t.asset.symbol,
            "tokenDecimal": str(t.asset.decimals)}


def provider_dataset(history) -> dict:
    return {
        "txlist": [native_row(t) for t in history.transfers if not isinstance(t.asset, Token)],
        "tokentx": [token_row(t) for t in history.transfers if isinstance(t.asset, Token)],
    }


def envelope(rows) -> bytes:
    return json.dumps({"status": "1" if rows else "0",
                       "message": "OK" if rows else "No transactions found",
                       "result": rows}).encode()


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def _send(self, status: int, body: bytes, ctype="application/json"):
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        url = urlparse(self.path)
        q = {k: v[0] for k, v in parse_qs(url.query).items()}
        srv = self.server
        srv.requests.append((url.path, q))
        route = url.path.strip("/").split("/")[0]
        if route == "notfound":
            return self._send(404, b"Not Found", "text/plain")
        if route == "forbidden":
            return self._send(403, b"<html>Forbidden</html>", "text/html")
        if route == "empty":
            return self._send(200, b"")
        if route == "emptyobj":
            return self._send(200, b"{}")
        if route == "badkey":
            return self._send(200, b'{"status":"0","message":"NOTOK","result":"Invalid API Key"}')
        if route == "garbage":
            return self._send(200, b"<html>maintenance</html>", "text/html")
        if route == "servererror":
            return self._send(502, b"Bad Gateway", "text/plain")
        if route == "slow":
            time.sleep(srv.slow_delay)
            return self._send(200, envelope([]))
        if route == "flags.txt":
            return self._send(200, srv.flag_text.encode(), "text/plain")
        if route == "ok":
            rows = srv.dataset.get(q.get("action"), [])
            page, offset = int(q.get("page", 1)), int(q.get("offset", 10_000))
            return self._send(200, envelope(rows[(page - 1) * offset: page * offset]))
        if route == "tokenfail":
            if q.get("action") == "tokentx":
                return self._send(403, b"Forbidden", "text/plain")
            return self._send(200, envelope(srv.dataset.get("txlist", [])))
        return self._send(404, b"no route", "text/plain")


class _QuietServer(ThreadingHTTPServer):
    def handle_error(self, request, client_address):
        # clients that time out on purpose leave broken pipes behind
        pass


class StubProvider:
    """Threaded local HTTP server; routes are the first path segment."""

    def __init__(self):
        self.httpd = _QuietServer(("127.0.0.1", 0), _Handler)
        self.httpd.requests = []
        self.httpd.dataset = {}
        self.httpd.slow_delay = 1.0
        self.httpd.flag_text = ""
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @property
    def base(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    def url(self, route: str) -> str:
        return f"{self.base}/{route}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()


# --- random histories for oracle comparisons ------------------------------------------

def _variant(rng, base: bytes, prefix: int, suffix: int) -> bytes:
    """Random address sharing at least ``prefix``/``suffix`` hex digits with ``base``."""
    h = base.hex()
    middle = "".join(rng.choice("0123456789abcdef") for _ in range(40 - prefix - suffix))
    return bytes.fromhex(h[:prefix] + middle + h[40 - suffix:])


def random_history(rng, registry, max_len: int = 200):
    from poisonguard.address import Address
    from poisonguard.transfers import NATIVE, USDT_CONTRACT, AccountHistory, Token, TransferRecord

    owner = Address(rng.randbytes(20))
    bases = [rng.randbytes(20) for _ in range(rng.randint(1, 6))]
    pool = [Address(b) for b in bases]
    for b in bases:
        for _ in range(rng.randint(0, 4)):
            pool.append(Address(_variant(rng, b, rng.randint(0, 7), rng.randint(0, 7))))
    pool += [Address(rng.randbytes(20)) for _ in range(rng.randint(0, 3))]
    pool = [a for a in pool if a != owner] or [Address(bytes(20))]
    fakes = [Address(rng.randbytes(20)) for _ in range(2)]
    assets = [
        NATIVE,
        Token(USDT_CONTRACT, "USDT", 6),
        Token(fakes[0], "USDT", 6),
        Token(fakes[1], rng.choice(["ETH", "eth"]), 18),
        Token(Address(rng.randbytes(20)), "FOO", 18),
    ]
    records = []
    log_index = 0
    for i in range(rng.randint(0, max_len)):
        other = rng.choice(pool)
        sender, recipient = (other, owner) if rng.random() < 0.8 else (owner, other)
        asset = rng.choice(assets)
        amount = rng.choice([0, 1, 10**4, 10**5, 10**5 + 1, 10**13, 10**14, 10**14 + 1, 10**18])
        li = None
        if asset is not NATIVE:
            li = log_index
            log_index += 1
        records.append(TransferRecord(rng.randbytes(32), rng.randint(1, 80), li, sender, recipient, asset, amount))
    return AccountHistory(owner, tuple(records))


def oracle_class(t, registry, dust: dict) -> str:
    from poisonguard.transfers import Token

    if isinstance(t.asset, Token):
        claimed = t.asset.symbol.upper()
        known = claimed == registry.native_symbol or claimed in registry.entries
        if known and t.asset.contract not in registry.entries.get(claimed, ()):
            return "FakeTokenZero" if t.amount == 0 else "FakeToken"
        symbol = claimed
    else:
        symbol = registry.native_symbol
    if t.amount == 0:
        return "ZeroValue"
    if symbol in dust and t.amount <= dust[symbol]:
        return "DustValue"
    return "LegitToken" if isinstance(t.asset, Token) else "LegitNative"


def oracle_rows(history, registry, dust: dict) -> list:
    return [{"key": t.key, "block": t.block, "sender": t.sender.hex, "recipient": t.recipient.hex,
             "cls": oracle_class(t, registry, dust)} for t in history.transfers]


def compare_with_oracle(history, verdicts, registry, cfg) -> list:
    """Mismatch descriptions between detector verdicts and the brute-force oracle."""
    import oracles
    from poisonguard.detector import MatchWindow

    rows = oracle_rows(history, registry, dict(cfg.dust_thresholds))
    thresholds = (cfg.lookalike.min_prefix, cfg.lookalike.min_suffix)
    expected = oracles.brute_force_match(history.owner.hex, rows, thresholds,
                                         cfg.match_window is MatchWindow.PAST_ONLY)
    problems = []
    for row, v in zip(rows, verdicts):
        incoming = row["recipient"] == history.owner.hex and row["sender"] != history.owner.hex
        if v.incoming != incoming:
            problems.append((row["key"], "direction"))
            continue
        if not incoming:
            continue
        if v.cls.value != row["cls"]:
            problems.append((row["key"], "class", v.cls.value, row["cls"]))
        if row["key"] not in expected:
            if v.matched_counterparty is not None or v.phishing:
                problems.append((row["key"], "legit transfer matched"))
            continue
        want = expected[row["key"]]
        got = None if v.matched_counterparty is None else (
            v.matched_counterparty.hex, v.score.prefix_match, v.score.suffix_match)
        if got != want:
            problems.append((row["key"], "match", got, want))
        if v.phishing != (row["cls"].startswith("Fake") or want is not None):
            problems.append((row["key"], "phishing flag"))
    return problems


def snapshot_doc(verdicts, visible: dict, design: str = "OneForAll") -> dict:
    """Feed snapshot JSON with one entry listing every verdict in the given state."""
    rows = [{"hash": "0x" + v.record.tx_hash.hex(), "logIndex": v.record.log_index,
             "state": visible.get(v.record.key, DisplayState.HIDDEN).value,
             "symbol": v.symbol} for v in verdicts]
    return {"design": design, "entries": {"all": rows}}
