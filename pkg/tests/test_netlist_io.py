"""JSON netlist serialization round trips and error reporting."""

import json

import pytest

from vnwfet.circuit import NetlistError, Resistor, VSourcePulse
from vnwfet.cells import build_inverter
from vnwfet.netlist_io import (element_from_dict, element_to_dict,
                               load_netlist, netlist_from_dict,
                               netlist_to_dict, save_netlist)
from conftest import make_card


@pytest.fixture
def inverter_netlist():
    return build_inverter("complementary", 2, make_card())


def test_round_trip(inverter_netlist):
    doc = netlist_to_dict(inverter_netlist)
    again = netlist_to_dict(netlist_from_dict(json.loads(json.dumps(doc))))
    assert again == doc


def test_file_round_trip(tmp_path, inverter_netlist):
    path = tmp_path / "cell.json"
    save_netlist(inverter_netlist, path)
    loaded = load_netlist(path)
    assert netlist_to_dict(loaded) == netlist_to_dict(inverter_netlist)


def test_all_element_kinds_round_trip(inverter_netlist):
    kinds = {element_to_dict(e)["type"] for e in inverter_netlist.elements}
    assert {"vsource_dc", "vsource_pulse", "vnwfet", "capacitor"} <= kinds
    r = Resistor("r1", "a", "b", 42.0)
    assert element_from_dict(element_to_dict(r)) == r


def test_unknown_element_type():
    with pytest.raises(NetlistError, match="unknown element type"):
        element_from_dict({"type": "inductor", "name": "l1"})


def test_missing_keys_reported():
    with pytest.raises(NetlistError, match="missing keys"):
        element_from_dict({"type": "resistor", "name": "r1", "n1": "a"})


def test_empty_elements_rejected():
    with pytest.raises(NetlistError, match="nonempty"):
        netlist_from_dict({"elements": []})


def test_bad_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{bad}\n")
    with pytest.raises(NetlistError, match=r"bad\.json:1:"):
        load_netlist(path)


def test_pulse_fields_preserved():
    src = VSourcePulse("vin", "in", "0", v0=0.1, v1=0.9, period=2e-9,
                       rise=2e-11, fall=3e-11, width=8e-10, delay=1e-10)
    assert element_from_dict(element_to_dict(src)) == src


def test_embedded_card_is_full_document(inverter_netlist):
    doc = netlist_to_dict(inverter_netlist)
    fets = [e for e in doc["elements"] if e["type"] == "vnwfet"]
    assert all("geometry" in e["card"] for e in fets)
    polarity = sorted(e["card"]["polarity"] for e in fets)
    assert polarity == ["n_type", "p_type"]
