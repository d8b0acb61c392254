import json
import subprocess
import sys

import pytest

from poisonguard.address import Address
from poisonguard.attack.scenario import BENIGN, PHISHING, VICTIM, shipped_scenario_path
from poisonguard.cli import build_parser, main, resolve_config
from poisonguard.ingest import load_fixture, save_fixture
from poisonguard.transfers import AccountHistory

from support import load_table, row_visibility, snapshot_doc

FIXTURE = str(shipped_scenario_path())
FLAGGED = Address.from_hex("0xa7bf487" + "0" * 27 + "e90570").checksum
FRESH = "0x" + "5a" * 20


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


# -- simulate --------------------------------------------------------------------

def test_simulate_default_reproduces_scenario(capsys, tmp_path, scenario):
    out = tmp_path / "t1.json"
    code, doc = run_json(capsys, "simulate", "--out", str(out), "--seed", "1")
    assert code == 0
    assert load_fixture(out) == scenario
    side = json.loads((tmp_path / "t1.provenance.json").read_text())
    assert side["source"] == "builtin" and side["seed"] == 1
    assert side["benign"] == BENIGN.checksum and side["phishing"] == PHISHING.checksum
    assert side["thresholds"] == {"prefix": 4, "suffix": 4}
    assert doc["provenance"] == side


def test_simulate_cheaper_pair_and_scan(capsys, tmp_path):
    out = tmp_path / "cheap.json"
    code, _, _ = run(capsys, "simulate", "--out", str(out), "--n", "2000", "--prefix", "2", "--suffix", "2",
                     "--seed", "7")
    assert code == 0
    side = json.loads((tmp_path / "cheap.provenance.json").read_text())
    assert side["source"] == "pair_search" and side["n"] == 2000 and side["pairsFound"] > 0
    assert side["benign"][:4].lower() == side["phishing"][:4].lower()
    code, doc = run_json(capsys, "scan", str(out), "--prefix", "2", "--suffix", "2")
    assert code == 5 and doc["phishingCount"] == 8
    # the same scenario again under the same seed is byte-identical
    again = tmp_path / "again.json"
    run(capsys, "simulate", "--out", str(again), "--n", "2000", "--prefix", "2", "--suffix", "2", "--seed", "7")
    assert again.read_text() == out.read_text()


def test_simulate_exhausted(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--out", str(tmp_path / "x.json"), "--n", "5", "--seed", "1")
    assert code == 6 and "no look-alike pair" in err
    assert not (tmp_path / "x.json").exists()


def test_simulate_unwritable_path(capsys):
    code, _, err = run(capsys, "simulate", "--out", "/nonexistent-dir/t1.json")
    assert code == 73 and "cannot write" in err


def test_simulate_requires_both_addresses(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", "--out", str(tmp_path / "x.json"), "--benign", BENIGN.checksum)
    assert code == 64


# -- scan --------------------------------------------------------------------

def test_scan_scenario_fixture(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, doc = run_json(capsys, "scan", FIXTURE, "--out", str(report))
    assert code == 5
    assert doc["phishingCount"] == 8 and len(doc["verdicts"]) == 10
    assert json.loads(report.read_text()) == doc
    assert doc["owner"] == VICTIM.checksum


def test_scan_text_output(capsys):
    code, out, _ = run(capsys, "scan", FIXTURE)
    assert code == 5 and out.strip().endswith("8 phishing of 10 transfers")


def test_scan_legit_only(capsys, tmp_path, scenario):
    path = tmp_path / "legit.json"
    save_fixture(AccountHistory(scenario.owner, (scenario.transfers[0], scenario.transfers[5])), path)
    code, report = run_json(capsys, "scan", str(path))
    assert code == 0 and report["phishingCount"] == 0 and len(report["verdicts"]) == 2


def test_scan_forbidden_endpoint(capsys, stub, caplog):
    code, out, err = run(capsys, "scan", "--endpoint", stub.url("forbidden"), "--address", VICTIM.checksum,
                         "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["diagnosis"] == "Forbidden" and doc["verdicts"] == [] and doc["phishingCount"] == 0
    assert "Forbidden" in err or "Forbidden" in caplog.text


def test_scan_healthy_endpoint(capsys, stub):
    code, doc = run_json(capsys, "scan", "--endpoint", stub.url("ok"), "--address", VICTIM.checksum)
    # token rows carry the claimed symbol, so the fake contracts are recognised as fakes
    assert code == 5 and doc["diagnosis"] == "Ok" and doc["phishingCount"] == 8


@pytest.mark.parametrize("argv,code", [
    (["scan"], 64),
    (["scan", "/nonexistent/fixture.json"], 66),
    (["scan", FIXTURE, "--prefix", "30", "--suffix", "11"], 64),
    (["scan", FIXTURE, "--match-window", "Sideways"], 64),
    (["scan", FIXTURE, "--dust-token", "NOPE=1"], 64),
    (["scan", FIXTURE, "--dust-token", "USDT"], 64),
    (["scan", "--endpoint", "ftp://example.invalid", "--address", VICTIM.checksum], 64),
])
def test_scan_usage_errors(capsys, argv, code):
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code


def test_scan_malformed_fixture(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "scan", str(bad))[0] == 65
    bad.write_text(json.dumps({"address": "0x12", "transfers": []}))
    code, _, err = run(capsys, "scan", str(bad))
    assert code == 65 and "/address" in err


def test_dust_flags_change_classes(capsys):
    _, doc = run_json(capsys, "scan", FIXTURE, "--dust-eth", "0.000000000000000001",
                      "--dust-token", "USDT=0.000001")
    classes = [v["class"] for v in doc["verdicts"]]
    assert "DustValue" not in classes and classes.count("LegitNative") == 2
    assert run(capsys, "scan", FIXTURE, "--dust-eth", "0")[0] == 64


# -- evaluate -----------------------------------------------------------------

MATRIX = {r["wallet"]: r for r in load_table("wallet_matrix.json")["rows"]}


def _snapshot(tmp_path, verdicts, wallet=None, name="snap.json", design="OneForAll"):
    visible = row_visibility(verdicts, MATRIX[wallet]) if wallet else {}
    path = tmp_path / name
    path.write_text(json.dumps(snapshot_doc(verdicts, visible, design)))
    return str(path)


@pytest.mark.parametrize("wallet,usability,risk", [("Bybit", 2, 4), ("Bitget", 2, 1), ("Uniswap", 2, 3)])
def test_evaluate_wallet_shapes(capsys, tmp_path, scenario_verdicts, wallet, usability, risk):
    code, doc = run_json(capsys, "evaluate", _snapshot(tmp_path, scenario_verdicts, wallet), FIXTURE)
    assert code == risk
    assert (doc["usability"], doc["risk"]) == (usability, risk)


def test_evaluate_empty_snapshot(capsys, tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"design": "OneForAll", "entries": {}}))
    code, doc = run_json(capsys, "evaluate", str(path), FIXTURE)
    assert code == 0 and (doc["usability"], doc["risk"]) == (0, 0)
    assert any("--probe" in n for n in doc["notes"])


def test_evaluate_with_probe_and_provider_view(capsys, tmp_path, scenario_verdicts):
    probe = tmp_path / "probe.json"
    probe.write_text(json.dumps({"endpoint": "http://x", "httpStatus": 200, "diagnosis": "EmptyBody",
                                 "bodyBytes": 0}))
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"design": "OneForAll", "entries": {}}))
    code, doc = run_json(capsys, "evaluate", str(empty), FIXTURE, "--probe", str(probe),
                         "--provider-view", FIXTURE)
    assert code == 0
    assert doc["diagnosis"] == "provider returned empty payload (HTTP 200)"
    assert set(doc["attribution"].values()) == {"Wallet"}


def test_evaluate_one_per_coin_note(capsys, tmp_path, scenario_verdicts):
    snap = _snapshot(tmp_path, scenario_verdicts, "Bybit", design="OnePerCoin")
    code, doc = run_json(capsys, "evaluate", snap, FIXTURE)
    assert code == 4 and any("one-per-coin" in n for n in doc["notes"])


def test_evaluate_bad_snapshot(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"design": "Grid", "entries": {}}))
    code, _, err = run(capsys, "evaluate", str(path), FIXTURE)
    assert code == 65 and "/design" in err
    assert run(capsys, "evaluate", str(tmp_path / "missing.json"), FIXTURE)[0] == 66


# -- vanity -------------------------------------------------------------------

def test_vanity_one_one(capsys):
    code, doc = run_json(capsys, "vanity", "--target", VICTIM.checksum, "--prefix", "1", "--suffix", "1",
                         "--seed", "3")
    assert code == 0 and doc["found"]
    assert doc["address"][2].lower() == VICTIM.hex[0] and doc["address"][-1].lower() == VICTIM.hex[-1]
    assert 1 <= doc["stats"]["candidatesTried"] < 5000
    assert "secret" not in doc


def test_vanity_reveal_and_zero_constraints(capsys):
    code, doc = run_json(capsys, "vanity", "--target", VICTIM.checksum, "--prefix", "0", "--suffix", "0",
                         "--seed", "3", "--reveal")
    assert code == 0 and doc["stats"]["candidatesTried"] == 1
    assert doc["secret"].startswith("0x") and len(doc["secret"]) == 66
    code, out, _ = run(capsys, "vanity", "--target", VICTIM.checksum, "--prefix", "0", "--suffix", "0",
                       "--seed", "3")
    assert doc["secret"] not in out


def test_vanity_exhausted(capsys):
    code, doc = run_json(capsys, "vanity", "--target", VICTIM.checksum, "--budget", "10", "--seed", "1")
    assert code == 6 and not doc["found"] and doc["stats"]["candidatesTried"] == 10


# -- check --------------------------------------------------------------------

def test_check_flagged(capsys, tmp_path):
    flags = tmp_path / "flags.txt"
    flags.write_text(f"# known scam\n{FLAGGED}\n")
    code, doc = run_json(capsys, "check", FLAGGED, "--flaglist", str(flags))
    assert code == 3 and doc["level"] == "ALERT"


def test_check_fresh_and_contact(capsys):
    assert run(capsys, "check", FRESH)[0] == 2
    assert run(capsys, "check", FRESH, "--contact", FRESH)[0] == 0


def test_check_with_history(capsys):
    code, doc = run_json(capsys, "check", PHISHING.checksum, "--history", FIXTURE)
    assert code == 3 and "sender of detected phishing transfers" in doc["reasons"]
    assert run(capsys, "check", BENIGN.checksum, "--history", FIXTURE)[0] == 0
    stale = str(1_000_050 + 648_001)
    assert run(capsys, "check", BENIGN.checksum, "--history", FIXTURE, "--current-block", stale)[0] == 1


def test_check_remote_flaglist(capsys, stub):
    stub.httpd.flag_text = FLAGGED + "\n"
    assert run(capsys, "check", FLAGGED, "--flaglist-url", stub.url("flags.txt"))[0] == 3
    assert run(capsys, "check", FLAGGED, "--flaglist-url", stub.url("notfound"))[0] == 74


def test_check_missing_flaglist(capsys, tmp_path):
    assert run(capsys, "check", FRESH, "--flaglist", str(tmp_path / "nope.txt"))[0] == 66


def test_check_bad_address(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "0x1234"])
    assert exc.value.code == 64


# -- fetch --------------------------------------------------------------------

@pytest.mark.parametrize("route,diagnosis,count", [("ok", "Ok", 10), ("empty", "EmptyBody", 0),
                                                   ("notfound", "NotFound", 0)])
def test_fetch(capsys, tmp_path, stub, route, diagnosis, count):
    out = tmp_path / "fetched.json"
    code, doc = run_json(capsys, "fetch", "--endpoint", stub.url(route), "--address", VICTIM.checksum,
                         "--out", str(out))
    assert code == 0
    assert len(load_fixture(out)) == count
    probe = json.loads((tmp_path / "fetched.probe.json").read_text())
    assert probe["diagnosis"] == diagnosis and doc["probe"] == probe


def test_fetch_apikey_from_env(capsys, tmp_path, stub, monkeypatch):
    monkeypatch.setenv("PG_TEST_KEY", "s3cret")
    code, out, err = run(capsys, "fetch", "--endpoint", stub.url("ok"), "--address", VICTIM.checksum,
                         "--out", str(tmp_path / "f.json"), "--apikey", "ENV:PG_TEST_KEY")
    assert code == 0
    assert all(q.get("apikey") == "s3cret" for _, q in stub.httpd.requests)
    assert "s3cret" not in out + err


@pytest.mark.parametrize("ref", ["s3cret", "ENV:", "ENV:PG_UNSET_KEY_XYZ"])
def test_fetch_bad_apikey_ref(capsys, tmp_path, stub, ref):
    code, _, _ = run(capsys, "fetch", "--endpoint", stub.url("ok"), "--address", VICTIM.checksum,
                     "--out", str(tmp_path / "f.json"), "--apikey", ref)
    assert code == 64


def test_fetch_then_evaluate_provider_view(capsys, tmp_path, stub, scenario_verdicts):
    out = tmp_path / "view.json"
    run(capsys, "fetch", "--endpoint", stub.url("tokenfail"), "--address", VICTIM.checksum, "--out", str(out))
    probe = tmp_path / "view.probe.json"
    assert json.loads(probe.read_text())["diagnosis"] == "Forbidden"
    snap = _snapshot(tmp_path, scenario_verdicts)
    code, doc = run_json(capsys, "evaluate", snap, FIXTURE, "--provider-view", str(out), "--probe", str(probe))
    assert code == 0 and doc["diagnosis"] == "provider rejected request (HTTP 403)"


# -- configuration ------------------------------------------------------------------

def test_flags_override_config_file_over_defaults(tmp_path, monkeypatch):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"prefix": 2, "suffix": 3, "workers": 2}))
    parser = build_parser()
    cfg = resolve_config(parser.parse_args(["scan", FIXTURE, "--config", str(cfg_path), "--prefix", "5"]), {})
    assert (cfg.prefix, cfg.suffix, cfg.workers, cfg.budget) == (5, 3, 2, 1_000_000)
    via_env = resolve_config(parser.parse_args(["scan", FIXTURE]), {"POISONGUARD_CONFIG": str(cfg_path)})
    assert (via_env.prefix, via_env.suffix) == (2, 3)
    assert resolve_config(parser.parse_args(["scan", FIXTURE]), {}).prefix == 4


def test_config_file_through_env_changes_scan(capsys, tmp_path, monkeypatch):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"dust_eth": "0.000000000000000001", "dust_tokens": {"USDT": "0.000001"}}))
    monkeypatch.setenv("POISONGUARD_CONFIG", str(cfg_path))
    _, doc = run_json(capsys, "scan", FIXTURE)
    assert "DustValue" not in {v["class"] for v in doc["verdicts"]}


@pytest.mark.parametrize("content,code", [
    ('{"prefix": 2, "colour": "red"}', 65),
    ('{"prefix": "two"}', 65),
    ('{"workers": 0}', 64),
    ("[1, 2]", 65),
    ("{oops", 65),
])
def test_bad_config_files(capsys, tmp_path, content, code):
    path = tmp_path / "cfg.json"
    path.write_text(content)
    assert run(capsys, "scan", FIXTURE, "--config", str(path))[0] == code


def test_missing_config_file(capsys, tmp_path):
    assert run(capsys, "scan", FIXTURE, "--config", str(tmp_path / "none.json"))[0] == 66


def test_json_outputs_round_trip(capsys, tmp_path, scenario_verdicts):
    _, scan = run_json(capsys, "scan", FIXTURE)
    assert json.loads(json.dumps(scan)) == scan
    assert set(scan["verdicts"][0]) == {"hash", "logIndex", "class", "symbol", "incoming", "phishing",
                                        "matchedCounterparty", "prefixMatch", "suffixMatch"}
    _, card = run_json(capsys, "evaluate", _snapshot(tmp_path, scenario_verdicts, "Rabby"), FIXTURE)
    assert {"usability", "risk", "evidence", "attribution"} <= set(card)
    _, chk = run_json(capsys, "check", FRESH)
    assert chk == {"recipient": Address.from_hex(FRESH).checksum, "level": "CONFIRMATION_REQUIRED",
                   "code": 2, "reasons": ["unknown address"]}


def test_usage_exit_code_for_bad_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


# -- as a real process ------------------------------------------------------------

def test_subprocess_entry_points(tmp_path):
    res = subprocess.run([sys.executable, "-m", "poisonguard.cli", "scan", FIXTURE, "--json"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 5
    assert json.loads(res.stdout)["phishingCount"] == 8
    res = subprocess.run([sys.executable, "-m", "poisonguard.cli", "check", FRESH],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 2 and res.stdout.startswith("CONFIRMATION_REQUIRED")
    res = subprocess.run([sys.executable, "-m", "poisonguard.cli", "--version"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and "poisonguard" in res.stdout
