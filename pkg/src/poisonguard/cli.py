"""Command-line entry point: simulate, scan, evaluate, vanity, check, fetch.

Exit codes 0-6 carry the headline result (risk level, warning level,
5 = phishing found, 6 = search exhausted). Codes 64 and above are usage,
data and I/O errors, following sysexits.h.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import secrets
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .address import HEX_LEN, Address, LookalikeThresholds, parse_address
from .attack.scenario import BENIGN, PHISHING, VICTIM, build_scenario
from .attack.search import pair_search, targeted_search
from .detector import DetectorConfig, MatchWindow, analyze_history, verdict_report
from .errors import DuplicateRecord, InvalidEndpoint, MalformedHex, PoisonguardError, SchemaError
from .evaluator import score
from .feed import EntryDesign, displayed_union, load_snapshot
from .guard import DEFAULT_STALENESS_BLOCKS, GuardConfig, WarningLevel, check_recipient, load_flaglist, parse_flaglist
from .ingest import EtherscanClient, ProbeReport, ProviderDiagnosis, history_to_json, load_fixture, save_fixture
from .ingest.etherscan import check_endpoint, fetch_text
from .transfers import LegitTokenRegistry, normalize_amount, registry_default, registry_from_json

log = logging.getLogger("poisonguard")

EXIT_OK = 0
EXIT_PHISHING = 5
EXIT_EXHAUSTED = 6
EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66
EX_CANTCREAT = 73
EX_IOERR = 74

CONFIG_ENV = "POISONGUARD_CONFIG"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; we reserve 0-6 for results."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Settings after merging built-in defaults, a JSON config file and flags."""

    seed: Optional[int] = None
    workers: int = 1
    prefix: int = 4
    suffix: int = 4
    n: Optional[int] = None
    budget: int = 1_000_000
    dust_eth: Optional[str] = None
    dust_tokens: dict = field(default_factory=dict)
    match_window: str = MatchWindow.PAST_ONLY.value
    endpoint: Optional[str] = None
    apikey: Optional[str] = None
    registry: object = None
    staleness_blocks: int = DEFAULT_STALENESS_BLOCKS
    current_block: Optional[int] = None
    flaglists: list = field(default_factory=list)
    flaglist_urls: list = field(default_factory=list)
    contacts: list = field(default_factory=list)
    timeout: float = 10.0


_FLAG_FIELDS = {
    "seed": "seed", "workers": "workers", "prefix": "prefix", "suffix": "suffix", "n": "n",
    "budget": "budget", "dust_eth": "dust_eth", "dust_token": "dust_tokens",
    "match_window": "match_window", "endpoint": "endpoint", "apikey": "apikey",
    "staleness_blocks": "staleness_blocks", "current_block": "current_block",
    "flaglist": "flaglists", "flaglist_url": "flaglist_urls", "contact": "contacts",
    "timeout": "timeout",
}


_INT_KEYS = {"seed", "workers", "prefix", "suffix", "n", "budget", "staleness_blocks", "current_block"}
_STR_KEYS = {"dust_eth", "match_window", "endpoint", "apikey"}
_LIST_KEYS = {"flaglists", "flaglist_urls", "contacts"}


def _type_ok(key: str, value) -> bool:
    if value is None:
        return key not in ("workers", "prefix", "suffix", "budget", "staleness_blocks", "timeout")
    if key in _INT_KEYS:
        return isinstance(value, int) and not isinstance(value, bool) and value >= 0
    if key in _STR_KEYS:
        return isinstance(value, str)
    if key in _LIST_KEYS:
        return isinstance(value, list) and all(isinstance(v, str) for v in value)
    if key == "dust_tokens":
        return isinstance(value, dict) and all(isinstance(v, str) for v in value.values())
    if key == "registry":
        return isinstance(value, (str, dict))
    if key == "timeout":
        return isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0
    return True


def _read_json(path, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(EX_NOINPUT, f"{what} not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EX_DATAERR, f"{what} {path} is not valid JSON: {exc}") from None
    except OSError as exc:
        raise CliError(EX_IOERR, f"cannot read {what} {path}: {exc}") from None


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    path = getattr(args, "config", None) or environ.get(CONFIG_ENV)
    if path:
        doc = _read_json(path, "config file")
        if not isinstance(doc, dict):
            raise CliError(EX_DATAERR, f"config file {path} must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise CliError(EX_DATAERR, f"config file {path}: unknown keys {', '.join(unknown)}")
        for key, value in doc.items():
            if not _type_ok(key, value):
                raise CliError(EX_DATAERR, f"config file {path}: bad value for {key}: {value!r}")
        cfg = dataclasses.replace(cfg, **doc)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if name == "dust_tokens":
            value = {**cfg.dust_tokens, **dict(value)}
        setattr(cfg, name, value)
    if not 0 <= cfg.prefix <= HEX_LEN or not 0 <= cfg.suffix <= HEX_LEN or cfg.prefix + cfg.suffix > HEX_LEN:
        raise CliError(EX_USAGE, "prefix and suffix must be non-negative and sum to at most 40")
    if cfg.workers < 1:
        raise CliError(EX_USAGE, "--workers must be at least 1")
    if cfg.seed is not None and not 0 <= cfg.seed < 2**256:
        raise CliError(EX_USAGE, "--seed must be a non-negative integer below 2**256")
    return cfg


def build_registry(cfg: RunConfig) -> LegitTokenRegistry:
    base = registry_default()
    if cfg.registry is None:
        return base
    doc = cfg.registry
    if isinstance(doc, str):
        doc = _read_json(doc, "registry")
    return registry_from_json(doc, base)


def detector_config(cfg: RunConfig, registry: LegitTokenRegistry) -> DetectorConfig:
    dust = dict(DetectorConfig().dust_thresholds)
    try:
        if cfg.dust_eth is not None:
            dust[registry.native_symbol.upper()] = normalize_amount(str(cfg.dust_eth), 18)
        for sym, amount in cfg.dust_tokens.items():
            contracts = sorted(registry.lookup(sym))
            if not contracts:
                raise CliError(EX_USAGE, f"--dust-token: {sym} is not in the token registry")
            decimals = registry.decimals_of(contracts[0])
            dust[sym.upper()] = normalize_amount(str(amount), 18 if decimals is None else decimals)
        return DetectorConfig(dust, LookalikeThresholds(cfg.prefix, cfg.suffix), MatchWindow(cfg.match_window))
    except CliError:
        raise
    except ValueError as exc:
        raise CliError(EX_USAGE, f"bad detector settings: {exc}") from None


def resolve_apikey(ref: Optional[str], environ=os.environ) -> Optional[str]:
    """Keys are passed by reference (``ENV:NAME``) so they stay out of argv and logs."""
    if not ref:
        return None
    if not ref.startswith("ENV:") or len(ref) == 4:
        raise CliError(EX_USAGE, "--apikey must have the form ENV:NAME")
    name = ref[4:]
    if name not in environ:
        raise CliError(EX_USAGE, f"environment variable {name} is not set")
    return environ[name]


def _load_history(path, registry):
    try:
        return load_fixture(path, registry)
    except FileNotFoundError:
        raise CliError(EX_NOINPUT, f"fixture not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EX_DATAERR, f"fixture {path} is not valid JSON: {exc}") from None
    except SchemaError as exc:
        raise CliError(EX_DATAERR, f"fixture {path}: {exc} (at {exc.pointer or '/'})") from None
    except (PoisonguardError, ValueError) as exc:
        raise CliError(EX_DATAERR, f"fixture {path}: {exc}") from None


def _write_json(path, doc) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise CliError(EX_CANTCREAT, f"cannot write {path}: {exc}") from None


def _sidecar(path, tag: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + f".{tag}.json")


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


def _address_arg(text: str) -> Address:
    try:
        parsed = parse_address(text)
    except MalformedHex as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if parsed.bad_checksum:
        log.warning("%s has a mixed-case checksum that does not verify", text)
    return parsed.address


def _token_amount(text: str) -> tuple:
    sym, sep, amount = text.partition("=")
    if not sep or not sym or not amount:
        raise argparse.ArgumentTypeError("expected SYM=AMOUNT, e.g. USDT=0.1")
    return sym.upper(), amount


def _non_negative(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    value = _non_negative(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


# -- subcommands ----------------------------------------------------------------

def cmd_simulate(args, cfg: RunConfig) -> int:
    registry = build_registry(cfg)
    thresholds = LookalikeThresholds(cfg.prefix, cfg.suffix)
    victim = args.victim or VICTIM
    provenance = {"victim": victim.checksum,
                  "thresholds": {"prefix": cfg.prefix, "suffix": cfg.suffix}}
    if args.benign or args.phishing:
        if not (args.benign and args.phishing):
            raise CliError(EX_USAGE, "--benign and --phishing must be given together")
        benign, phishing = args.benign, args.phishing
        provenance.update(source="provided", seed=cfg.seed, n=None, candidates=0, pairsFound=None)
    elif cfg.n is None:
        benign, phishing = BENIGN, PHISHING
        provenance.update(source="builtin", seed=cfg.seed, n=None, candidates=0, pairsFound=None)
    else:
        seed = cfg.seed if cfg.seed is not None else secrets.randbits(64)
        pairs = pair_search(cfg.n, cfg.prefix, cfg.suffix, seed=seed, workers=cfg.workers)
        provenance.update(source="pair_search", seed=seed, n=cfg.n, candidates=cfg.n, pairsFound=len(pairs))
        usable = [p for p in pairs if victim not in (p[0][0].address, p[0][1].address)]
        if not usable:
            msg = f"no look-alike pair at ({cfg.prefix},{cfg.suffix}) among {cfg.n} keys (seed {seed})"
            print(f"poisonguard: {msg}", file=sys.stderr)
            _emit(args, {"error": "SearchExhausted", "provenance": provenance}, msg)
            return EXIT_EXHAUSTED
        (kb, kp), _ = usable[0]
        benign, phishing = kb.address, kp.address
    try:
        history = build_scenario(victim, benign, phishing, registry, thresholds)
    except (PoisonguardError, ValueError) as exc:
        raise CliError(EX_USAGE, str(exc)) from None
    provenance.update(benign=benign.checksum, phishing=phishing.checksum)
    try:
        save_fixture(history, args.out)
    except OSError as exc:
        raise CliError(EX_CANTCREAT, f"cannot write {args.out}: {exc}") from None
    side = _sidecar(args.out, "provenance")
    _write_json(side, provenance)
    _emit(args, {"fixture": str(args.out), "provenance": provenance},
          f"wrote {args.out} ({len(history)} transfers) and {side}\n"
          f"benign   {benign.checksum}\nphishing {phishing.checksum}")
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    registry = build_registry(cfg)
    det = detector_config(cfg, registry)
    doc: dict = {}
    if args.fixture:
        history = _load_history(args.fixture, registry)
    else:
        endpoint = cfg.endpoint
        if not endpoint or args.address is None:
            raise CliError(EX_USAGE, "scan needs a fixture path or --endpoint with --address")
        try:
            result = EtherscanClient(timeout=cfg.timeout).fetch_history(
                endpoint, resolve_apikey(cfg.apikey), args.address, registry)
        except InvalidEndpoint as exc:
            raise CliError(EX_USAGE, str(exc)) from None
        history = result.history
        doc["diagnosis"] = result.diagnosis.value
        if result.diagnosis is not ProviderDiagnosis.OK:
            log.warning("provider diagnosis: %s; reporting an empty history", result.diagnosis.value)
    verdicts = analyze_history(history, registry, det)
    rows = verdict_report(verdicts)
    n_phish = sum(1 for v in verdicts if v.phishing)
    doc.update(owner=history.owner.checksum, phishingCount=n_phish, verdicts=rows,
               thresholds={"prefix": cfg.prefix, "suffix": cfg.suffix})
    if args.out:
        _write_json(args.out, doc)
    lines = [f"{r['hash'][:12]}.. {r['class']:<14} {'PHISHING' if r['phishing'] else 'ok':<8} "
             f"{r['matchedCounterparty'] or ''}" for r in rows]
    lines.append(f"{n_phish} phishing of {len(rows)} transfers")
    _emit(args, doc, "\n".join(lines))
    return EXIT_PHISHING if n_phish else EXIT_OK


def cmd_evaluate(args, cfg: RunConfig) -> int:
    registry = build_registry(cfg)
    det = detector_config(cfg, registry)
    try:
        snapshot = load_snapshot(args.feed)
    except FileNotFoundError:
        raise CliError(EX_NOINPUT, f"feed snapshot not found: {args.feed}") from None
    except SchemaError as exc:
        raise CliError(EX_DATAERR, f"feed snapshot {args.feed}: {exc} (at {exc.pointer or '/'})") from None
    history = _load_history(args.ground_truth, registry)
    verdicts = analyze_history(history, registry, det)
    provider_view = None
    if args.provider_view:
        provider_view = {t.key for t in _load_history(args.provider_view, registry).transfers}
    probe = None
    if args.probe:
        try:
            probe = ProbeReport.from_json(_read_json(args.probe, "probe report")).diagnosis
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(EX_DATAERR, f"probe report {args.probe}: {exc}") from None
    union = displayed_union(snapshot)
    truth_keys = {t.key for t in history.transfers}
    card = score(union, verdicts, provider_view, probe)
    stray = len(set(union) - truth_keys)
    if stray:
        card.notes.append(f"{stray} displayed rows are not in the ground truth and were ignored")
    if snapshot.design is EntryDesign.ONE_PER_COIN:
        card.notes.append("one-per-coin feed: transfers of coins without an entry count as hidden")
    if card.usability == 0 and card.diagnosis is None:
        card.notes.append("usability 0: supply --probe to attribute the failure")
    doc = card.to_json()
    _emit(args, doc, f"usability {card.usability}  risk {card.risk}"
          + "".join(f"\n  note: {n}" for n in card.notes)
          + (f"\n  diagnosis: {card.diagnosis}" if card.diagnosis else ""))
    return card.risk


def cmd_vanity(args, cfg: RunConfig) -> int:
    seed = cfg.seed if cfg.seed is not None else secrets.randbits(64)
    if cfg.budget < 1:
        raise CliError(EX_USAGE, "--budget must be at least 1")
    kp, stats = targeted_search(args.target, cfg.prefix, cfg.suffix, cfg.budget, seed=seed, workers=cfg.workers)
    doc = {"target": args.target.checksum, "prefix": cfg.prefix, "suffix": cfg.suffix,
           "seed": seed, "budget": cfg.budget, "found": kp is not None, "stats": stats.to_json()}
    stat_line = (f"tried {stats.candidates_tried} candidates in {stats.elapsed:.3f}s "
                 f"({stats.throughput:.0f}/s), seed {seed}")
    if kp is None:
        print(f"poisonguard: search exhausted after {cfg.budget} candidates", file=sys.stderr)
        _emit(args, doc, stat_line)
        return EXIT_EXHAUSTED
    doc["address"] = kp.address.checksum
    text = f"{kp.address.checksum}\n{stat_line}"
    if args.reveal:
        doc["secret"] = kp.secret_hex
        text += f"\nsecret {kp.secret_hex}"
    _emit(args, doc, text)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    registry = build_registry(cfg)
    flags = []
    for path in cfg.flaglists:
        try:
            flags.append(load_flaglist(path))
        except FileNotFoundError:
            raise CliError(EX_NOINPUT, f"flag list not found: {path}") from None
        except OSError as exc:
            raise CliError(EX_IOERR, f"cannot read flag list {path}: {exc}") from None
    for url in cfg.flaglist_urls:
        try:
            flags.append(parse_flaglist(fetch_text(url, timeout=cfg.timeout), url))
        except InvalidEndpoint as exc:
            raise CliError(EX_USAGE, str(exc)) from None
        except Exception as exc:  # requests raises a zoo of types
            raise CliError(EX_IOERR, f"cannot fetch flag list {url}: {exc}") from None
    contacts = []
    for text in cfg.contacts:
        try:
            contacts.append(_address_arg(text) if isinstance(text, str) else text)
        except argparse.ArgumentTypeError as exc:
            raise CliError(EX_USAGE, f"bad contact {text!r}: {exc}") from None
    verdicts, owner = [], None
    if args.history:
        history = _load_history(args.history, registry)
        verdicts = analyze_history(history, registry, detector_config(cfg, registry))
        owner = history.owner
    gcfg = GuardConfig(LookalikeThresholds(cfg.prefix, cfg.suffix), cfg.staleness_blocks, cfg.current_block)
    level, reasons = check_recipient(args.recipient, flags, verdicts, contacts, gcfg, owner)
    doc = {"recipient": args.recipient.checksum, "level": level.name, "code": int(level), "reasons": reasons}
    _emit(args, doc, level.name + "".join(f"\n  {r}" for r in reasons))
    return int(level)


def cmd_fetch(args, cfg: RunConfig) -> int:
    registry = build_registry(cfg)
    if not cfg.endpoint:
        raise CliError(EX_USAGE, "fetch needs --endpoint")
    try:
        check_endpoint(cfg.endpoint)
    except InvalidEndpoint as exc:
        raise CliError(EX_USAGE, str(exc)) from None
    result = EtherscanClient(timeout=cfg.timeout).fetch_history(
        cfg.endpoint, resolve_apikey(cfg.apikey), args.address, registry)
    try:
        save_fixture(result.history, args.out)
    except OSError as exc:
        raise CliError(EX_CANTCREAT, f"cannot write {args.out}: {exc}") from None
    probe_path = args.probe_out or _sidecar(args.out, "probe")
    probe_doc = result.probe.to_json() if result.probe else {
        "endpoint": cfg.endpoint, "httpStatus": None, "diagnosis": result.diagnosis.value, "bodyBytes": 0}
    probe_doc["diagnosis"] = result.diagnosis.value
    probe_doc["probes"] = [p.to_json() for p in result.probes]
    probe_doc["truncated"] = dict(result.truncated)
    _write_json(probe_path, probe_doc)
    if result.diagnosis is not ProviderDiagnosis.OK:
        log.warning("provider diagnosis: %s", result.diagnosis.value)
    _emit(args, {"fixture": str(args.out), "probe": probe_doc, "transfers": len(result.history)},
          f"{result.diagnosis.value}: wrote {len(result.history)} transfers to {args.out}, probe report {probe_path}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", metavar="PATH", help=f"JSON config file (default: ${CONFIG_ENV})")
    g.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    g.add_argument("--seed", type=_non_negative, help="seed for every random choice")
    g.add_argument("--workers", type=_positive, help="worker processes for key search")
    g.add_argument("--prefix", type=_non_negative, help="look-alike prefix hex digits (default 4)")
    g.add_argument("--suffix", type=_non_negative, help="look-alike suffix hex digits (default 4)")
    g.add_argument("--dust-eth", metavar="AMT", help="dust ceiling for the native coin, in ETH")
    g.add_argument("--dust-token", metavar="SYM=AMT", type=_token_amount, action="append",
                   help="dust ceiling for a registry token, in token units (repeatable)")
    g.add_argument("--match-window", choices=[m.value for m in MatchWindow])
    g.add_argument("--endpoint", metavar="URL", help="Etherscan-compatible API base URL")
    g.add_argument("--apikey", metavar="ENV:NAME", help="read the API key from environment variable NAME")
    g.add_argument("--timeout", type=float, help="HTTP timeout in seconds")
    g.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="poisonguard", description="Address-poisoning simulation, detection and wallet scoring.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", parents=[common], help="write a poisoning-scenario fixture")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--victim", type=_address_arg)
    p.add_argument("--benign", type=_address_arg)
    p.add_argument("--phishing", type=_address_arg)
    p.add_argument("--n", type=_positive, help="search a look-alike pair among N fresh keys")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", parents=[common], help="classify an account history")
    p.add_argument("fixture", nargs="?", help="history fixture (or use --endpoint/--address)")
    p.add_argument("--address", type=_address_arg)
    p.add_argument("--out", metavar="PATH", help="also write the JSON report here")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("evaluate", parents=[common], help="score a wallet feed snapshot")
    p.add_argument("feed", help="feed snapshot JSON")
    p.add_argument("ground_truth", help="history fixture the feed was rendered from")
    p.add_argument("--provider-view", metavar="FIXTURE", help="what the provider returned")
    p.add_argument("--probe", metavar="PATH", help="probe report from `fetch`")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("vanity", parents=[common], help="search a key whose address resembles a target")
    p.add_argument("--target", type=_address_arg, required=True)
    p.add_argument("--budget", type=_positive)
    p.add_argument("--reveal", action="store_true", help="print the secret key")
    p.set_defaults(func=cmd_vanity)

    p = sub.add_parser("check", parents=[common], help="warning level for sending to a recipient")
    p.add_argument("recipient", type=_address_arg)
    p.add_argument("--flaglist", metavar="PATH", action="append", help="local flag list (repeatable)")
    p.add_argument("--flaglist-url", metavar="URL", action="append", help="remote flag list (repeatable)")
    p.add_argument("--history", metavar="FIXTURE")
    p.add_argument("--contact", metavar="ADDR", action="append")
    p.add_argument("--staleness-blocks", type=_non_negative)
    p.add_argument("--current-block", type=_non_negative)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fetch", parents=[common], help="download an account history and probe the provider")
    p.add_argument("--address", type=_address_arg, required=True)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--probe-out", metavar="PATH", help="probe report path (default: OUT stem + .probe.json)")
    p.set_defaults(func=cmd_fetch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except CliError as exc:
        print(f"poisonguard: {exc}", file=sys.stderr)
        return exc.code
    except (SchemaError, DuplicateRecord) as exc:
        print(f"poisonguard: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
