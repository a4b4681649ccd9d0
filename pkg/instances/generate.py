"""Regenerate the bundled instance corpus: python3 instances/generate.py"""

from pathlib import Path

from cmsearch import io
from cmsearch.generators import (
    random_cabinets_instance,
    random_cms_instance,
    random_noi_instance,
    random_pandora_instance,
)
from cmsearch.matroid import Matroid
from cmsearch.model import (
    MSP,
    Cabinet,
    CabinetsInstance,
    CMSInstance,
    DiscreteDistribution,
    NOIPandoraInstance,
    PandoraCabinetsInstance,
)

HERE = Path(__file__).parent
SEEDS = [11, 23, 37, 41]


def box(cost=0.1):
    return MSP.build([0, 0, 1], [[(cost, [(1, 0.5), (2, 0.5)])], [], []], labels=["open", "empty", "prize"])


def worked_examples():
    yield "box", CMSInstance((box(),), Matroid.uniform(1, 1))
    yield "two_boxes", CMSInstance((box(), box()), Matroid.uniform(2, 1))
    yield "sink5", CMSInstance((MSP.sink(5.0),), Matroid.uniform(1, 1))
    yield "two_actions", CMSInstance(
        (MSP.build([0, 0, 1, 2], [[(0.1, [(1, 0.5), (2, 0.5)]), (0.4, [(3, 1.0)])], [], [], []],
                   labels=["start", "zero", "one", "two"]),),
        Matroid.uniform(1, 1),
    )
    yield "two_stage_bandit", CMSInstance(
        (MSP.build([0, 0, 0, 0, 1], [[(0.05, [(1, 0.5), (2, 0.5)])], [], [(0.1, [(3, 0.5), (4, 0.5)])], [], []],
                   labels=["s0", "dud", "s1", "zero", "one"]),),
        Matroid.uniform(1, 1),
    )
    half = Cabinet.from_scenarios([(0.5, [0.0]), (0.5, [10.0])])
    yield "cabinet_two_drawers", CabinetsInstance(
        (Cabinet.from_scenarios([(0.5, [10.0, 6.0]), (0.5, [0.0, 6.0])]),), Matroid.uniform(1, 1))
    yield "two_half_cabinets", CabinetsInstance((half, half), Matroid.uniform(2, 1))
    det1, det2 = Cabinet.from_scenarios([(1.0, [1.0])]), Cabinet.from_scenarios([(1.0, [2.0])])
    yield "deterministic_rank1", CabinetsInstance((det1, det2), Matroid.uniform(2, 1))
    yield "deterministic_rank2", CabinetsInstance((det1, det2), Matroid.uniform(2, 2))
    d = 0.01
    yield "near_tight", CabinetsInstance(
        (det1, Cabinet.from_scenarios([(d, [1 / d]), (1 - d, [0.0])])), Matroid.uniform(2, 1))
    yield "pandora_box", PandoraCabinetsInstance(((box(),),), Matroid.uniform(1, 1))
    yield "noi_two_boxes", NOIPandoraInstance((
        (2.0, DiscreteDistribution.from_pairs([(0.0, 0.5), (10.0, 0.5)])),
        (1.0, DiscreteDistribution.from_pairs([(3.0, 1.0)])),
    ))


def random_suites():
    for s in SEEDS:
        yield f"random_cms_{s}", random_cms_instance(s)
        yield f"random_cabinets_{s}", random_cabinets_instance(s)
        yield f"random_pandora_{s}", random_pandora_instance(s)
        yield f"random_noi_{s}", random_noi_instance(s)


CYCLIC = """{
 "kind": "cms",
 "matroid": {"type": "uniform", "n": 1, "k": 1},
 "processes": [{"states": [{"id": 0, "value": 0.0}, {"id": 1, "value": 0.0}], "start": 0,
  "actions": [{"state": 0, "cost": 0.1, "transitions": [{"to": 1, "p": 1.0}]},
              {"state": 1, "cost": 0.1, "transitions": [{"to": 0, "p": 1.0}]}]}]
}
"""

BAD_PROBS = """{
 "kind": "cms",
 "matroid": {"type": "uniform", "n": 1, "k": 1},
 "processes": [{"states": [{"id": 0, "value": 0.0}, {"id": 1, "value": 0.0}, {"id": 2, "value": 1.0}], "start": 0,
  "actions": [{"state": 0, "cost": 0.1, "transitions": [{"to": 1, "p": 0.5}, {"to": 2, "p": 0.4}]}]}]
}
"""


if __name__ == "__main__":
    for name, inst in [*worked_examples(), *random_suites()]:
        io.dump(inst, HERE / f"{name}.json")
    (HERE / "invalid" / "cyclic.json").write_text(CYCLIC, encoding="utf-8")
    (HERE / "invalid" / "bad_probs.json").write_text(BAD_PROBS, encoding="utf-8")
