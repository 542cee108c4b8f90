"""Model-card files: JSON with explicit unit-suffixed keys.

Example card (all keys shown; see ``CARD_SCHEMA`` for descriptions)::

    {
      "name": "pvnwfet_default",
      "polarity": "p_type",
      "geometry": {
        "diameter_nm": 16.0,
        "gate_length_nm": 14.0,
        "oxide_thickness_nm": 5.0,
        "access_length_nm": 20.0,
        "nanowire_count": 16
      },
      "doping_cm3": 2.0e19,
      "flatband_v": 2.0,
      "interface_trap_eta": 1.2,
      "mobility_cm2_per_vs": 5.0,
      ...
    }

The file stores the nanowire *diameter*; internally the model works with the
radius.  Convenience units (nm, cm^-3, aF, MV/cm) are converted to SI at
parse time.
"""

from __future__ import annotations

import json
from pathlib import Path

from .compact_model import DeviceGeometry, ModelCard

_NM = 1e-9
_DEFAULT_CARD_PATH = Path(__file__).parent / "data" / "pvnwfet_default.json"


class CardFormatError(ValueError):
    """Malformed or out-of-range model-card file."""


#: key -> (required, description)
CARD_SCHEMA = {
    "name": (False, "free-form card label"),
    "polarity": (True, "'p_type' or 'n_type'"),
    "geometry.diameter_nm": (True, "nanowire diameter D = 2R, nm"),
    "geometry.gate_length_nm": (True, "physical channel length L, nm"),
    "geometry.oxide_thickness_nm": (True, "gate-oxide thickness, nm"),
    "geometry.access_length_nm": (True, "source/drain access region length, nm"),
    "geometry.nanowire_count": (True, "parallel nanowires NF, integer >= 1"),
    "doping_cm3": (True, "channel doping N_D, cm^-3"),
    "flatband_v": (True, "flat-band voltage V_FB (normalized polarity), V"),
    "interface_trap_eta": (True, "interface trap / slope parameter eta"),
    "mobility_cm2_per_vs": (True, "low-field mobility mu0, cm^2/(V s)"),
    "saturation_velocity_m_per_s": (False, "velocity saturation limit, m/s"),
    "series_rs_ohm": (False, "source access resistance, ohm"),
    "series_rd_ohm": (False, "drain access resistance, ohm"),
    "resistance_bias_eta1": (False, "drain-bias factor eta1 of the access term"),
    "dibl_v_per_v": (False, "DIBL coefficient, V/V"),
    "vds_min_v": (False, "lower operating drain bias for the DIBL shift, V"),
    "vds_max_v": (False, "upper operating drain bias for the DIBL shift, V"),
    "gidl_a": (False, "GIDL pre-factor A_GIDL (fit units)"),
    "gidl_b_mv_per_cm": (False, "GIDL field parameter B_GIDL, MV/cm"),
    "gidl_c": (False, "GIDL drain-bias mixing factor C_GIDL"),
    "temperature_k": (False, "device temperature, K"),
    "gate_cap_per_nanowire_af": (False, "lumped gate capacitance per nanowire, aF"),
    "cox_model": (False, "'coaxial' (default) or 'planar' oxide capacitance"),
    "clm_lambda_nm": (False, "channel-length-modulation scale, nm (0 = off)"),
    "clm_ve_v": (False, "channel-length-modulation knee voltage, V"),
}


def _get(doc: dict, key: str, convert, default=None, path: str = ""):
    where = f"{path}.{key}" if path else key
    if key not in doc:
        if default is not None:
            return default
        raise CardFormatError(f"missing required key '{where}'")
    try:
        return convert(doc[key])
    except (TypeError, ValueError) as exc:
        raise CardFormatError(f"bad value for '{where}': {doc[key]!r} ({exc})") from exc


def card_from_dict(doc: dict) -> ModelCard:
    if not isinstance(doc, dict):
        raise CardFormatError("card document must be a JSON object")
    gdoc = doc.get("geometry")
    if not isinstance(gdoc, dict):
        raise CardFormatError("missing or non-object 'geometry' section")
    geometry = DeviceGeometry(
        radius_R=_get(gdoc, "diameter_nm", float, path="geometry") * _NM / 2.0,
        gate_length_L=_get(gdoc, "gate_length_nm", float, path="geometry") * _NM,
        oxide_thickness_tox=_get(gdoc, "oxide_thickness_nm", float, path="geometry") * _NM,
        access_length_LAccess=_get(gdoc, "access_length_nm", float, path="geometry") * _NM,
        nanowire_count_NF=_get(gdoc, "nanowire_count", int, path="geometry"),
    )
    return ModelCard(
        geometry=geometry,
        polarity=_get(doc, "polarity", str),
        doping_ND=_get(doc, "doping_cm3", float) * 1e6,
        flatband_VFB=_get(doc, "flatband_v", float),
        interface_trap_eta=_get(doc, "interface_trap_eta", float),
        low_field_mobility_mu0=_get(doc, "mobility_cm2_per_vs", float) * 1e-4,
        saturation_velocity_vsat=_get(doc, "saturation_velocity_m_per_s", float, 5e6),
        series_RS=_get(doc, "series_rs_ohm", float, 0.0),
        series_RD=_get(doc, "series_rd_ohm", float, 0.0),
        resistance_bias_eta1=_get(doc, "resistance_bias_eta1", float, 0.5),
        dibl_coefficient=_get(doc, "dibl_v_per_v", float, 0.0),
        vds_range=(_get(doc, "vds_min_v", float, 0.0),
                   _get(doc, "vds_max_v", float, 1.0)),
        gidl_A=_get(doc, "gidl_a", float, 0.0),
        gidl_B=_get(doc, "gidl_b_mv_per_cm", float, 21.3) * 1e8,
        gidl_C=_get(doc, "gidl_c", float, 0.5),
        temperature=_get(doc, "temperature_k", float, 300.0),
        gate_cap_per_nanowire=_get(doc, "gate_cap_per_nanowire_af", float, 3.25) * 1e-18,
        cox_model=_get(doc, "cox_model", str, "coaxial"),
        clm_lambda=_get(doc, "clm_lambda_nm", float, 0.0) * _NM,
        clm_VE=_get(doc, "clm_ve_v", float, 0.1),
    )


def card_to_dict(card: ModelCard, name: str = "") -> dict:
    g = card.geometry
    doc = {
        "polarity": card.polarity,
        "geometry": {
            "diameter_nm": 2.0 * g.radius_R / _NM,
            "gate_length_nm": g.gate_length_L / _NM,
            "oxide_thickness_nm": g.oxide_thickness_tox / _NM,
            "access_length_nm": g.access_length_LAccess / _NM,
            "nanowire_count": int(g.nanowire_count_NF),
        },
        "doping_cm3": card.doping_ND / 1e6,
        "flatband_v": card.flatband_VFB,
        "interface_trap_eta": card.interface_trap_eta,
        "mobility_cm2_per_vs": card.low_field_mobility_mu0 / 1e-4,
        "saturation_velocity_m_per_s": card.saturation_velocity_vsat,
        "series_rs_ohm": card.series_RS,
        "series_rd_ohm": card.series_RD,
        "resistance_bias_eta1": card.resistance_bias_eta1,
        "dibl_v_per_v": card.dibl_coefficient,
        "vds_min_v": card.vds_range[0],
        "vds_max_v": card.vds_range[1],
        "gidl_a": card.gidl_A,
        "gidl_b_mv_per_cm": card.gidl_B / 1e8,
        "gidl_c": card.gidl_C,
        "temperature_k": card.temperature,
        "gate_cap_per_nanowire_af": card.gate_cap_per_nanowire / 1e-18,
        "cox_model": card.cox_model,
        "clm_lambda_nm": card.clm_lambda / _NM,
        "clm_ve_v": card.clm_VE,
    }
    if name:
        doc = {"name": name, **doc}
    return doc


def load_card(path) -> ModelCard:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CardFormatError(f"cannot read card file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CardFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    try:
        return card_from_dict(doc)
    except CardFormatError as exc:
        raise CardFormatError(f"{path}: {exc}") from exc


def save_card(card: ModelCard, path, name: str = "") -> None:
    Path(path).write_text(json.dumps(card_to_dict(card, name=name), indent=2) + "\n")


def default_card() -> ModelCard:
    """The calibrated default p-type card shipped with the package."""
    return load_card(_DEFAULT_CARD_PATH)
