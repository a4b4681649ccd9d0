import json
import subprocess
import sys
from pathlib import Path

import pytest

from cmsearch.generators import random_cabinets_instance, random_cms_instance, random_noi_instance, random_pandora_instance
from cmsearch.io import InstanceFormatError, dumps, load, loads

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "instances"


def cli(*args, cwd=ROOT):
    r = subprocess.run([sys.executable, "-m", "cmsearch.cli", *map(str, args)], capture_output=True, text=True, cwd=cwd)
    return r.returncode, r.stdout, r.stderr


@pytest.mark.parametrize("make", [random_cms_instance, random_cabinets_instance, random_pandora_instance, random_noi_instance])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_round_trip(make, seed):
    inst = make(seed)
    text = dumps(inst)
    assert dumps(loads(text)) == text


def test_round_trip_is_bit_exact():
    inst = random_cms_instance(7)
    back = loads(dumps(inst))
    assert all(a.values == b.values for a, b in zip(inst.processes, back.processes))


@pytest.mark.parametrize("text, where", [
    ("{", "line 1"),
    ('{"kind": "nope"}', "$.kind"),
    ('{"kind": "cms", "matroid": {"type": "uniform", "n": 1, "k": 1}}', "processes"),
    ('{"kind": "cms", "matroid": {"type": "uniform", "n": 1, "k": 1}, "processes": [{"states": [{"id": 0}], "start": 4}]}', "start"),
])
def test_format_errors_name_location(text, where):
    with pytest.raises(InstanceFormatError) as e:
        loads(text)
    assert where in str(e.value)


def test_corpus_loads():
    for f in CORPUS.glob("*.json"):
        assert load(f).violations() == []


def test_cli_saup_example():
    code, out, _ = cli("saup", CORPUS / "two_actions.json", "--tau", "0.5")
    doc = json.loads(out)
    assert code == 0
    assert doc["saup"][0]["value"] == pytest.approx(1.1)
    assert doc["saup"][0]["start_decision"] == "action 1"


@pytest.mark.parametrize("name", ["cyclic.json", "bad_probs.json"])
def test_cli_invalid_exit_code(name):
    code, out, _ = cli("validate", CORPUS / "invalid" / name)
    assert code == 2
    assert json.loads(out)["valid"] is False


def test_cli_missing_file_and_bad_params(tmp_path):
    assert cli("exante", tmp_path / "missing.json")[0] == 2
    assert cli("prophet", CORPUS / "box.json", "--eps", "1.5")[0] == 2
    assert cli("prophet", CORPUS / "box.json", "--trials", "1")[0] == 2


def test_cli_budget_exit_code():
    assert cli("oracle", CORPUS / "random_cms_11.json", "--budget", "1")[0] == 3


def test_cli_exante_and_oracle():
    assert json.loads(cli("exante", CORPUS / "two_boxes.json")[1])["objective"] == pytest.approx(0.8)
    assert json.loads(cli("oracle", CORPUS / "two_boxes.json")[1])["opt"] == pytest.approx(0.6)


def test_cli_convert_round_trip(tmp_path):
    out = tmp_path / "pc.json"
    assert cli("convert", CORPUS / "noi_two_boxes.json", "--to", "pandora_cabinets", "-o", out)[0] == 0
    a = json.loads(cli("oracle", CORPUS / "noi_two_boxes.json")[1])["opt"]
    b = json.loads(cli("oracle", out)[1])["opt"]
    assert a == pytest.approx(b)


def test_cli_bench(tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = cli("bench", CORPUS, "--out", out, "--trials", "2000", "--omit-timing")
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "instance,kind,n,exante_obj,oracle_opt,alg_mean,alg_se,ratio,wall_ms"
    assert len(rows) == 1 + len(list(CORPUS.glob("*.json")))


def test_cli_prophet_deterministic():
    a = cli("prophet", CORPUS / "two_boxes.json", "--trials", "500", "--seed", "4")
    assert a == cli("prophet", CORPUS / "two_boxes.json", "--trials", "500", "--seed", "4")
