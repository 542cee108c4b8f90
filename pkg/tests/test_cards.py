"""Model-card file round trips and validation diagnostics."""

import json

import pytest

from vnwfet.cards import (CARD_SCHEMA, CardFormatError, card_from_dict,
                          card_to_dict, default_card, load_card, save_card)
from conftest import make_card


def test_default_card_loads(card):
    assert card.polarity == "p_type"
    assert card.nf == 16
    assert card.geometry.radius_R == pytest.approx(8e-9)
    assert card.geometry.gate_length_L == pytest.approx(14e-9)
    assert card.doping_ND == pytest.approx(2e25)


def test_round_trip_preserves_card(tmp_path):
    original = make_card(rs=712.0, rd=713.0, gidl_A=1e-2,
                         dibl_coefficient=0.02)
    path = tmp_path / "card.json"
    save_card(original, path, name="round-trip")
    loaded = load_card(path)
    # unit conversions (nm, cm^2/Vs, aF) cost at most one ulp per field
    for field in ("flatband_VFB", "low_field_mobility_mu0", "series_RS",
                  "gidl_A", "gate_cap_per_nanowire", "doping_ND"):
        assert getattr(loaded, field) == pytest.approx(
            getattr(original, field), rel=1e-15)
    assert loaded.geometry == original.geometry
    # a second cycle is exactly stable
    assert card_to_dict(loaded) == card_to_dict(card_from_dict(card_to_dict(loaded)))


def test_dict_round_trip(card):
    assert card_from_dict(card_to_dict(card)) == card


def test_diameter_is_stored_not_radius(card):
    doc = card_to_dict(card)
    assert doc["geometry"]["diameter_nm"] == pytest.approx(16.0)


def test_missing_required_key_is_named():
    doc = card_to_dict(make_card())
    del doc["flatband_v"]
    with pytest.raises(CardFormatError, match="flatband_v"):
        card_from_dict(doc)


def test_bad_value_is_named():
    doc = card_to_dict(make_card())
    doc["mobility_cm2_per_vs"] = "fast"
    with pytest.raises(CardFormatError, match="mobility_cm2_per_vs"):
        card_from_dict(doc)


def test_missing_geometry_section():
    with pytest.raises(CardFormatError, match="geometry"):
        card_from_dict({"polarity": "p_type"})


def test_invalid_json_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "polarity": p_type\n}\n')
    with pytest.raises(CardFormatError, match=r"broken\.json:2:"):
        load_card(path)


def test_missing_file_reports_path(tmp_path):
    with pytest.raises(CardFormatError, match="nope.json"):
        load_card(tmp_path / "nope.json")


def test_gidl_b_unit_conversion():
    doc = card_to_dict(make_card())
    doc["gidl_b_mv_per_cm"] = 21.3
    assert card_from_dict(doc).gidl_B == pytest.approx(2.13e9)


def test_schema_covers_all_emitted_keys(card):
    doc = card_to_dict(card, name="x")
    keys = set()
    for k, v in doc.items():
        if isinstance(v, dict):
            keys.update(f"{k}.{sub}" for sub in v)
        else:
            keys.add(k)
    assert keys <= set(CARD_SCHEMA)


def test_optional_keys_defaulted():
    doc = card_to_dict(make_card())
    for key in ("series_rs_ohm", "gidl_a", "temperature_k", "cox_model"):
        doc.pop(key, None)
    card = card_from_dict(doc)
    assert card.series_RS == 0.0
    assert card.gidl_A == 0.0
    assert card.temperature == 300.0
    assert card.cox_model == "coaxial"


def test_save_is_deterministic(tmp_path):
    card = make_card()
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_card(card, p1)
    save_card(card, p2)
    assert p1.read_bytes() == p2.read_bytes()
    json.loads(p1.read_text())  # valid JSON
