"""Acceptance suite.  Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from cmsearch import (
    Matroid,
    brute_force_opt,
    brute_force_opt_cabinets,
    brute_force_opt_cms,
    brute_force_saup,
    exante_opt_cabinets,
    exante_opt_cms,
    exact_dag_curve,
    fptas_dag_curve,
    maxsaup,
)
from cmsearch._config import SizeLimitError
from cmsearch.generators import (
    random_bandit,
    random_cabinets_instance,
    random_cms_instance,
    random_feasible_point,
    random_matroid,
    random_msp,
    random_noi_instance,
)
from cmsearch.indices import amortization_check, compute_indices, is_exposed
from cmsearch.model import CabinetsInstance, enumerate_policies
from cmsearch.matroid import sample_feasible_sets, to_set
from cmsearch.prophet import cms_prophet_plan, estimate_welfare, matroid_cabinets_plan
from cmsearch.reductions import convert_cabinets_to_cms, convert_noi_to_cabinets, max_shift
from cmsearch.rng import make_rng

from conftest import cab

pytestmark = pytest.mark.acceptance

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "instances"


_tr = None


@pytest.fixture(autouse=True)
def _reporter(request):
    global _tr
    _tr = request.config.pluginmanager.getplugin("terminalreporter")


def report(k: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    if _tr is not None:
        _tr.write_line("")
        _tr.write_line(line)
    else:
        print(line)


def test_1_maxsaup_optimality():
    worst = 0.0
    for seed in range(500):
        rng = make_rng(seed)
        m = random_msp(rng, int(rng.integers(2, 7)), max_actions=2)
        for tau in np.round(rng.uniform(0, 2.5, size=5), 3):
            worst = max(worst, abs(maxsaup(m, tau).value - brute_force_saup(m, tau)))
    ok = worst <= 1e-9
    report(1, ok, f"500 MSPs x 5 taus, max |maxsaup - brute| = {worst:.2e}")
    assert ok


def test_2_amortization():
    bad_ineq = bad_eq = checked = 0
    for seed in range(200):
        rng = make_rng(10_000 + seed)
        b = random_bandit(rng, int(rng.integers(1, 7)))
        table = compute_indices(b)
        for pi in enumerate_policies(b, claim_at_nonsinks=False):
            lhs, rhs = amortization_check(b, pi, table)
            checked += 1
            if lhs > rhs + 1e-9:
                bad_ineq += 1
            if (abs(lhs - rhs) <= 1e-9) == is_exposed(b, pi, table):
                bad_eq += 1
    ok = bad_ineq == 0 and bad_eq == 0
    report(2, ok, f"{checked} policies on 200 bandits, ineq violations {bad_ineq}, iff violations {bad_eq}")
    assert ok


def test_3_fptas_sandwich():
    bad = 0
    used = 0
    seed = 0
    while used < 100:
        rng = make_rng(20_000 + seed)
        seed += 1
        m = random_msp(rng, int(rng.integers(2, 8)), max_actions=2)
        try:
            f = exact_dag_curve(m)
        except SizeLimitError:
            continue
        used += 1
        qs = rng.uniform(0, 1, size=50)
        fq = f(qs)
        for c in (1e-2, 1e-3):
            for eps in (0.05, 0.2):
                h = fptas_dag_curve(m, c, eps)(qs)
                bad += int(np.sum(h > (fq + c) * (1 + eps) + 1e-12))
                bad += int(np.sum(h < (fq - c) / (1 + eps) - 1e-12))
    ok = bad == 0
    report(3, ok, f"100 MSPs x 4 (c, eps) x 50 q, sandwich violations {bad}")
    assert ok


def test_4_exante_dominance():
    worst = np.inf
    for seed in range(100):
        inst = random_cms_instance(30_000 + seed)
        worst = min(worst, exante_opt_cms(inst, "exact").objective - brute_force_opt_cms(inst))
        inst = random_cabinets_instance(31_000 + seed, max_n=4)
        worst = min(worst, exante_opt_cabinets(inst).objective - brute_force_opt_cabinets(inst))
    ok = worst >= -1e-9
    report(4, ok, f"100 CMS + 100 cabinets, min(exante - OPT) = {worst:.3e}")
    assert ok


def test_5_matroid_cabinets():
    trials = 100_000
    fails = []
    for seed in range(50):
        inst = random_cabinets_instance(40_000 + seed, max_n=5, max_rank=2)
        sol = exante_opt_cabinets(inst)
        for scale in (1.0, 0.7):
            z = scale * sol.z
            plan = matroid_cabinets_plan(inst, sol.q, z, threshold_mode="exact")
            mean, se = estimate_welfare(plan, trials, base_seed=seed)
            target = 0.5 * float(np.dot(sol.q, z))
            if mean < target - 4 * se:
                fails.append((seed, scale, mean, target, se))
    ok = not fails
    report(5, ok, f"50 instances x (z, 0.7z), 1e5 trials, shortfalls {fails[:3]}")
    assert ok


def test_6_end_to_end():
    trials = 100_000
    eps = 0.1
    used, seed = 0, 0
    fails = []
    worst = np.inf
    while used < 30:
        inst = random_cms_instance(50_000 + seed)
        seed += 1
        try:
            brute_force_opt_cms(inst, budget=200_000)
            obj = exante_opt_cms(inst, "exact").objective
        except SizeLimitError:
            continue
        used += 1
        plan = cms_prophet_plan(inst, eps)
        mean, se = estimate_welfare(plan, trials, base_seed=seed)
        if obj > 0:
            worst = min(worst, mean / obj)
        if mean < (0.5 - eps) * obj - 4 * se:
            fails.append((seed - 1, mean, obj, se))
    ok = not fails
    report(6, ok, f"30 CMS instances, eps=0.1, 1e5 trials, min ratio {worst:.3f}, shortfalls {fails[:3]}")
    assert ok


def test_7_near_tightness():
    d = 0.01
    inst = CabinetsInstance((cab((1.0, [1.0])), cab((d, [1 / d]), (1 - d, [0.0]))), Matroid.uniform(2, 1))
    sol = exante_opt_cabinets(inst)
    plan = matroid_cabinets_plan(inst, sol.q, sol.z, threshold_mode="exact")
    mean, se = estimate_welfare(plan, 100_000, base_seed=7)
    ratio = mean / sol.objective
    ok = abs(sol.objective - (2 - d)) <= 1e-9 and 0.45 <= ratio <= 0.56
    report(7, ok, f"exante {sol.objective:.4f}, welfare {mean:.4f} +- {se:.4f}, ratio {ratio:.4f}")
    assert ok


def test_8_sampler():
    n_samples = 100_000
    worst_z = 0.0
    dependent = 0
    for seed in range(50):
        rng = make_rng(60_000 + seed)
        m = random_matroid(rng, int(rng.integers(2, 7)), max_rank=3)
        q = random_feasible_point(rng, m)
        masks = sample_feasible_sets(m, q, n_samples, seed=seed)
        for mask in np.unique(masks):
            if not m.is_independent(to_set(int(mask))):
                dependent += 1
        bits = (masks[:, None] >> np.arange(m.n)) & 1
        freq = bits.mean(axis=0)
        sd = np.sqrt(np.maximum(q * (1 - q), 1e-12) / n_samples)
        z = np.abs(freq - q) / sd
        z[(q <= 0) | (q >= 1)] = np.where(np.abs(freq - q)[(q <= 0) | (q >= 1)] > 0, np.inf, 0)
        worst_z = max(worst_z, float(z.max()))
    ok = worst_z <= 4 and dependent == 0
    report(8, ok, f"50 (matroid, Q) pairs, 1e5 samples, max |z| = {worst_z:.2f}, dependent samples {dependent}")
    assert ok


def test_9_reductions():
    worst = 0.0
    for seed in range(50):
        noi = random_noi_instance(70_000 + seed)
        pc = convert_noi_to_cabinets(noi)
        cms = convert_cabinets_to_cms(pc, max_shift(pc) / 2)
        a, b, c = brute_force_opt(noi), brute_force_opt(pc), brute_force_opt(cms)
        worst = max(worst, abs(a - b), abs(b - c))
    ok = worst <= 1e-9
    report(9, ok, f"50 NOI instances through both reductions, max gap {worst:.2e}")
    assert ok


def _cli(*args):
    r = subprocess.run([sys.executable, "-m", "cmsearch.cli", *args], capture_output=True, cwd=ROOT)
    return r.returncode, r.stdout, r.stderr


def test_10_determinism(tmp_path):
    files = sorted(p for p in CORPUS.glob("*.json"))
    diffs = []
    runs = 0
    for f in files:
        kind = f.read_text().split('"kind": "', 1)[1].split('"', 1)[0]
        cmds = [["validate"], ["exante"], ["oracle"], ["prophet", "--trials", "2000", "--seed", "3"]]
        if kind in ("cms", "pandora_cabinets"):
            cmds += [["index"], ["saup", "--tau", "0.5"]]
        if kind == "cms":
            cmds.append(["exante", "--fptas", "--c", "0.01", "--eps", "0.1"])
        if kind == "noi_pandora":
            cmds.append(["convert", "--to", "pandora_cabinets"])
        if kind == "pandora_cabinets":
            cmds.append(["convert", "--to", "cms", "--eps", "0.5"])
        for c in cmds:
            first = _cli(c[0], str(f), *c[1:])
            second = _cli(c[0], str(f), *c[1:])
            runs += 1
            if first != second:
                diffs.append(f"{f.name}:{' '.join(c)}")
    outs = []
    for k in range(2):
        out = tmp_path / f"bench{k}.csv"
        _cli("bench", str(CORPUS), "--out", str(out), "--trials", "2000", "--seed", "1", "--omit-timing")
        outs.append(out.read_bytes())
    runs += 1
    if outs[0] != outs[1]:
        diffs.append("bench")
    ok = not diffs
    report(10, ok, f"{runs} command runs twice each, differing outputs {diffs[:5]}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
