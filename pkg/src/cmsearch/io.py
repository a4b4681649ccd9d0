"""JSON instance files.

Layout::

    {"kind": "cms" | "cabinets" | "pandora_cabinets" | "noi_pandora",
     "matroid": {"type": "uniform", "n": 2, "k": 1}
              | {"type": "partition", "blocks": [[0, 1], [2]], "caps": [1, 1]}
              | {"type": "explicit", "n": 3, "independent": [[], [0], ...]},
     "processes": [MSP, ...]                   # cms
     "cabinets": [[{"p": .5, "values": [..]}, ...], ...]   # cabinets
     "cabinets": [[MSP, ...], ...]             # pandora_cabinets
     "boxes": [{"cost": c, "dist": [{"value": v, "p": p}, ...]}, ...]}

    MSP = {"states": [{"id": 0, "value": 0.0}, ...], "start": 0,
           "actions": [{"state": 0, "cost": 0.1,
                        "transitions": [{"to": 1, "p": 0.5}, ...]}, ...]}

Floats are written with Python's shortest round-trip repr, so reading a
written file reproduces every value bit for bit.  Noi files carry no
matroid (the problem is single-choice).
"""

from __future__ import annotations

import json
from pathlib import Path

from .matroid import Matroid
from .model import (
    MSP,
    Action,
    Cabinet,
    CabinetsInstance,
    CMSInstance,
    DiscreteDistribution,
    NOIPandoraInstance,
    PandoraCabinetsInstance,
)

KINDS = ("cms", "cabinets", "pandora_cabinets", "noi_pandora")


class InstanceFormatError(ValueError):
    """A structurally malformed instance document."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _get(d, key, where):
    if not isinstance(d, dict):
        raise InstanceFormatError(where, "expected an object")
    if key not in d:
        raise InstanceFormatError(where, f"missing field {key!r}")
    return d[key]


def _num(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InstanceFormatError(where, f"expected a number, got {x!r}")
    return float(x)


def _int(x, where) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceFormatError(where, f"expected an integer, got {x!r}")
    return x


def _list(x, where) -> list:
    if not isinstance(x, list):
        raise InstanceFormatError(where, "expected a list")
    return x


# -- parsing -----------------------------------------------------------------


def msp_from_json(d, where: str = "msp") -> MSP:
    states = _list(_get(d, "states", where), f"{where}.states")
    ids = {}
    values = []
    for k, st in enumerate(states):
        w = f"{where}.states[{k}]"
        sid = _int(_get(st, "id", w), f"{w}.id")
        if sid in ids:
            raise InstanceFormatError(w, f"duplicate state id {sid}")
        ids[sid] = k
        values.append(_num(st.get("value", 0.0), f"{w}.value"))
    acts: list[list[Action]] = [[] for _ in states]
    for k, a in enumerate(_list(d.get("actions", []), f"{where}.actions")):
        w = f"{where}.actions[{k}]"
        s = _int(_get(a, "state", w), f"{w}.state")
        if s not in ids:
            raise InstanceFormatError(f"{w}.state", f"unknown state {s}")
        trans = []
        for r, t in enumerate(_list(_get(a, "transitions", w), f"{w}.transitions")):
            wt = f"{w}.transitions[{r}]"
            to = _int(_get(t, "to", wt), f"{wt}.to")
            if to not in ids:
                raise InstanceFormatError(f"{wt}.to", f"unknown state {to}")
            trans.append((ids[to], _num(_get(t, "p", wt), f"{wt}.p")))
        acts[ids[s]].append(Action.make(_num(_get(a, "cost", w), f"{w}.cost"), trans))
    start = _int(_get(d, "start", where), f"{where}.start")
    if start not in ids:
        raise InstanceFormatError(f"{where}.start", f"unknown state {start}")
    labels = [str(st["label"]) if "label" in st else str(st["id"]) for st in states]
    return MSP(tuple(values), tuple(tuple(a) for a in acts), ids[start], tuple(labels))


def matroid_from_json(d, where: str = "matroid") -> Matroid:
    kind = _get(d, "type", where)
    try:
        if kind == "uniform":
            return Matroid.uniform(_int(_get(d, "n", where), f"{where}.n"), _int(_get(d, "k", where), f"{where}.k"))
        if kind == "partition":
            blocks = [[_int(e, f"{where}.blocks") for e in _list(b, f"{where}.blocks")] for b in _list(_get(d, "blocks", where), f"{where}.blocks")]
            caps = [_int(c, f"{where}.caps") for c in _list(_get(d, "caps", where), f"{where}.caps")]
            return Matroid.partition(blocks, caps)
        if kind == "explicit":
            sets = [[_int(e, f"{where}.independent") for e in _list(s, f"{where}.independent")] for s in _list(_get(d, "independent", where), f"{where}.independent")]
            return Matroid.explicit(_int(_get(d, "n", where), f"{where}.n"), sets)
    except InstanceFormatError:
        raise
    except ValueError as e:
        raise InstanceFormatError(where, str(e)) from None
    raise InstanceFormatError(f"{where}.type", f"unknown matroid type {kind!r}")


def _dist(lst, where) -> DiscreteDistribution:
    pairs = []
    for k, a in enumerate(_list(lst, where)):
        w = f"{where}[{k}]"
        pairs.append((_num(_get(a, "value", w), f"{w}.value"), _num(_get(a, "p", w), f"{w}.p")))
    return DiscreteDistribution.from_pairs(pairs)


def instance_from_json(doc):
    kind = _get(doc, "kind", "$")
    if kind not in KINDS:
        raise InstanceFormatError("$.kind", f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind == "noi_pandora":
        boxes = []
        for k, b in enumerate(_list(_get(doc, "boxes", "$"), "$.boxes")):
            w = f"$.boxes[{k}]"
            boxes.append((_num(_get(b, "cost", w), f"{w}.cost"), _dist(_get(b, "dist", w), f"{w}.dist")))
        return NOIPandoraInstance(tuple(boxes))
    m = matroid_from_json(_get(doc, "matroid", "$"), "$.matroid")
    if kind == "cms":
        procs = _list(_get(doc, "processes", "$"), "$.processes")
        return CMSInstance(tuple(msp_from_json(p, f"$.processes[{k}]") for k, p in enumerate(procs)), m)
    cabs = _list(_get(doc, "cabinets", "$"), "$.cabinets")
    if kind == "cabinets":
        out = []
        for k, scen in enumerate(cabs):
            w = f"$.cabinets[{k}]"
            rows = []
            for r, sc in enumerate(_list(scen, w)):
                ws = f"{w}[{r}]"
                vals = [_num(v, f"{ws}.values") for v in _list(_get(sc, "values", ws), f"{ws}.values")]
                rows.append((_num(_get(sc, "p", ws), f"{ws}.p"), vals))
            if not rows:
                raise InstanceFormatError(w, "cabinet has no scenarios")
            try:
                out.append(Cabinet.from_scenarios(rows))
            except ValueError as e:
                raise InstanceFormatError(w, str(e)) from None
        return CabinetsInstance(tuple(out), m)
    return PandoraCabinetsInstance(
        tuple(
            tuple(msp_from_json(d, f"$.cabinets[{k}][{j}]") for j, d in enumerate(_list(ds, f"$.cabinets[{k}]")))
            for k, ds in enumerate(cabs)
        ),
        m,
    )


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"line {e.lineno} column {e.colno}", e.msg) from None
    return instance_from_json(doc)


def load(path) -> object:
    return loads(Path(path).read_text(encoding="utf-8"))


# -- writing -----------------------------------------------------------------


def msp_to_json(m: MSP) -> dict:
    states = []
    for s in range(m.n_states):
        st = {"id": s, "value": m.values[s]}
        if m.labels is not None and m.labels[s] != str(s):
            st["label"] = m.labels[s]
        states.append(st)
    actions = [
        {"state": s, "cost": a.cost, "transitions": [{"to": t, "p": p} for t, p in a.transitions]}
        for s in range(m.n_states)
        for a in m.actions[s]
    ]
    return {"states": states, "start": m.start, "actions": actions}


def matroid_to_json(m: Matroid) -> dict:
    if m.kind == "uniform":
        return {"type": "uniform", "n": m.n, "k": m.k}
    if m.kind == "partition":
        return {"type": "partition", "blocks": [list(b) for b in m.blocks], "caps": list(m.caps)}
    return {"type": "explicit", "n": m.n, "independent": [sorted(s) for s in m.independent_sets()]}


def instance_to_json(inst) -> dict:
    if isinstance(inst, NOIPandoraInstance):
        return {
            "kind": "noi_pandora",
            "boxes": [{"cost": c, "dist": [{"value": v, "p": p} for v, p in d.support]} for c, d in inst.boxes],
        }
    doc = {"matroid": matroid_to_json(inst.matroid)}
    if isinstance(inst, CMSInstance):
        doc = {"kind": "cms", **doc, "processes": [msp_to_json(p) for p in inst.processes]}
    elif isinstance(inst, CabinetsInstance):
        doc = {
            "kind": "cabinets",
            **doc,
            "cabinets": [
                [{"p": float(p), "values": [float(v) for v in row]} for p, row in zip(c.probs, c.values)]
                for c in inst.cabinets
            ],
        }
    elif isinstance(inst, PandoraCabinetsInstance):
        doc = {"kind": "pandora_cabinets", **doc, "cabinets": [[msp_to_json(d) for d in ds] for ds in inst.cabinets]}
    else:
        raise TypeError(f"cannot serialise {type(inst).__name__}")
    return doc


def dumps(inst) -> str:
    return json.dumps(instance_to_json(inst), indent=1) + "\n"


def dump(inst, path) -> None:
    Path(path).write_text(dumps(inst), encoding="utf-8")
