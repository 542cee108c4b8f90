"""JSON netlist files mirroring the circuit element variants.

Format::

    {
      "ground": "0",
      "elements": [
        {"type": "resistor",  "name": "r1", "n1": "out", "n2": "0", "ohms": 1e3},
        {"type": "capacitor", "name": "c1", "n1": "out", "n2": "0", "farads": 1e-15},
        {"type": "vsource_dc", "name": "vdd", "npos": "vdd", "nneg": "0", "volts": 1.0},
        {"type": "vsource_pulse", "name": "vin", "npos": "in", "nneg": "0",
         "v0": 0.0, "v1": 1.0, "period": 1e-9, "rise": 1e-11, "fall": 1e-11,
         "width": 4.9e-10, "delay": 0.0},
        {"type": "vnwfet", "name": "mp", "drain": "out", "gate": "in",
         "source": "vdd", "card": { ...model-card document... }}
      ]
    }

Device cards are embedded model-card documents (same schema as card files).
"""

from __future__ import annotations

import json
from pathlib import Path

from .cards import card_from_dict, card_to_dict
from .circuit import (Capacitor, Netlist, NetlistError, Resistor, Vnwfet,
                      VSourceDC, VSourcePulse)


def _require(doc: dict, keys, what: str) -> list:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise NetlistError(f"{what}: missing keys {missing}")
    return [doc[k] for k in keys]


def element_from_dict(doc: dict):
    if not isinstance(doc, dict) or "type" not in doc:
        raise NetlistError("element must be an object with a 'type' key")
    kind = doc["type"]
    what = f"element {doc.get('name', '?')!r} ({kind})"
    try:
        if kind == "resistor":
            name, n1, n2, ohms = _require(doc, ("name", "n1", "n2", "ohms"), what)
            return Resistor(name, n1, n2, float(ohms))
        if kind == "capacitor":
            name, n1, n2, f = _require(doc, ("name", "n1", "n2", "farads"), what)
            return Capacitor(name, n1, n2, float(f))
        if kind == "vsource_dc":
            name, p, n, v = _require(doc, ("name", "npos", "nneg", "volts"), what)
            return VSourceDC(name, p, n, float(v))
        if kind == "vsource_pulse":
            name, p, n = _require(doc, ("name", "npos", "nneg"), what)
            return VSourcePulse(
                name, p, n,
                v0=float(doc.get("v0", 0.0)), v1=float(doc.get("v1", 1.0)),
                period=float(_require(doc, ("period",), what)[0]),
                rise=float(doc.get("rise", 1e-12)),
                fall=float(doc.get("fall", 1e-12)),
                width=float(_require(doc, ("width",), what)[0]),
                delay=float(doc.get("delay", 0.0)))
        if kind == "vnwfet":
            name, d, g, s, card = _require(
                doc, ("name", "drain", "gate", "source", "card"), what)
            return Vnwfet(name, drain=d, gate=g, source=s,
                          card=card_from_dict(card))
    except (TypeError, ValueError) as exc:
        raise NetlistError(f"{what}: {exc}") from exc
    raise NetlistError(f"unknown element type {kind!r}")


def element_to_dict(el) -> dict:
    if isinstance(el, Resistor):
        return {"type": "resistor", "name": el.name, "n1": el.n1,
                "n2": el.n2, "ohms": el.ohms}
    if isinstance(el, Capacitor):
        return {"type": "capacitor", "name": el.name, "n1": el.n1,
                "n2": el.n2, "farads": el.farads}
    if isinstance(el, VSourcePulse):
        return {"type": "vsource_pulse", "name": el.name, "npos": el.npos,
                "nneg": el.nneg, "v0": el.v0, "v1": el.v1,
                "period": el.period, "rise": el.rise, "fall": el.fall,
                "width": el.width, "delay": el.delay}
    if isinstance(el, VSourceDC):
        return {"type": "vsource_dc", "name": el.name, "npos": el.npos,
                "nneg": el.nneg, "volts": el.volts}
    if isinstance(el, Vnwfet):
        return {"type": "vnwfet", "name": el.name, "drain": el.drain,
                "gate": el.gate, "source": el.source,
                "card": card_to_dict(el.card)}
    raise NetlistError(f"unknown element {el!r}")


def netlist_from_dict(doc: dict) -> Netlist:
    if not isinstance(doc, dict):
        raise NetlistError("netlist document must be a JSON object")
    elements = doc.get("elements")
    if not isinstance(elements, list) or not elements:
        raise NetlistError("netlist needs a nonempty 'elements' array")
    nl = Netlist(ground=doc.get("ground", "0"))
    for el in elements:
        nl.add(element_from_dict(el))
    nl.validate()
    return nl


def netlist_to_dict(nl: Netlist) -> dict:
    return {"ground": nl.ground,
            "elements": [element_to_dict(el) for el in nl.elements]}


def load_netlist(path) -> Netlist:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise NetlistError(f"cannot read netlist {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise NetlistError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    try:
        return netlist_from_dict(doc)
    except NetlistError as exc:
        raise NetlistError(f"{path}: {exc}") from exc


def save_netlist(nl: Netlist, path) -> None:
    Path(path).write_text(json.dumps(netlist_to_dict(nl), indent=2) + "\n")
