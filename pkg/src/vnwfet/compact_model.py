"""Charge-based compact model for junctionless vertical-nanowire FETs.

The mobile charge is split into a depletion component and a complementary
accumulation component, each obtained from a unified charge-control relation
inverted with the Lambert W function.  On top of the long-channel current the
model applies velocity saturation, source/drain access-resistance
degradation, gate-induced drain leakage and a DIBL threshold shift.

Convention notes
----------------
* The geometry stores the nanowire *radius*; card files accept the diameter
  and convert.  Treating the symbol as a radius keeps the depletion charge
  q*ND*R/2 and the gate capacitance dimensionally consistent.
* All equations are evaluated in a normalized n-like polarity.  For p-type
  cards every terminal voltage is sign-flipped on the way in and the current
  is sign-flipped on the way out.
* All quantities are SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

from .constants import EPS_SI, EPS_SIO2, Q_ELEMENTARY, thermal_voltage
from .numerics import lambert_w0_exp

P_TYPE = "p_type"
N_TYPE = "n_type"


class InvalidCardError(ValueError):
    """Model card violates a physical invariant."""


@dataclass(frozen=True)
class DeviceGeometry:
    radius_R: float          # nanowire radius, m
    gate_length_L: float     # physical channel length, m
    oxide_thickness_tox: float
    access_length_LAccess: float
    nanowire_count_NF: int = 1

    def __post_init__(self):
        for name in ("radius_R", "gate_length_L", "oxide_thickness_tox",
                     "access_length_LAccess"):
            if getattr(self, name) <= 0:
                raise InvalidCardError(f"{name} must be > 0")
        if int(self.nanowire_count_NF) < 1:
            raise InvalidCardError("nanowire_count_NF must be >= 1")


@dataclass(frozen=True)
class ModelCard:
    geometry: DeviceGeometry
    polarity: str = P_TYPE
    doping_ND: float = 2e25                  # 1/m^3 (2e19 cm^-3)
    flatband_VFB: float = 2.0                # V, normalized polarity
    interface_trap_eta: float = 1.2
    low_field_mobility_mu0: float = 5e-4     # m^2/(V s)
    saturation_velocity_vsat: float = 5e6    # m/s
    series_RS: float = 0.0                   # ohm (per nanowire, see Eq. 4 use)
    series_RD: float = 0.0
    resistance_bias_eta1: float = 0.5
    dibl_coefficient: float = 0.0            # V/V
    vds_range: tuple = (0.0, 1.0)            # (VDSmin, VDSmax), V
    gidl_A: float = 0.0
    gidl_B: float = 2.13e9                   # V/m (21.3 MV/cm)
    gidl_C: float = 0.5
    temperature: float = 300.0
    gate_cap_per_nanowire: float = 3.25e-18  # F
    cox_model: str = "coaxial"               # or "planar"
    clm_lambda: float = 0.0                  # channel-length modulation, m
    clm_VE: float = 0.1                      # V, CLM knee voltage

    def __post_init__(self):
        if self.polarity not in (P_TYPE, N_TYPE):
            raise InvalidCardError(f"unknown polarity {self.polarity!r}")
        if self.interface_trap_eta <= 0:
            raise InvalidCardError("interface_trap_eta must be > 0")
        if self.low_field_mobility_mu0 <= 0 or self.saturation_velocity_vsat <= 0:
            raise InvalidCardError("mobility and vsat must be > 0")
        if self.series_RS < 0 or self.series_RD < 0:
            raise InvalidCardError("series resistances must be >= 0")
        if self.gidl_B <= 0:
            raise InvalidCardError("gidl_B must be > 0")
        if self.temperature <= 0:
            raise InvalidCardError("temperature must be > 0")
        if self.vds_range[1] < self.vds_range[0]:
            raise InvalidCardError("vds_range must be (min, max) with max >= min")
        if self.cox_model not in ("coaxial", "planar"):
            raise InvalidCardError(f"unknown cox_model {self.cox_model!r}")

    @property
    def nf(self) -> int:
        return int(self.geometry.nanowire_count_NF)

    def with_nf(self, nf: int) -> "ModelCard":
        return replace(self, geometry=replace(self.geometry, nanowire_count_NF=nf))


@dataclass(frozen=True)
class DerivedQuantities:
    thermal_phiT: float
    Cox: float    # F/m^2, per unit gate area
    Qsc: float    # C/m^2
    Qdep: float   # C/m^2
    Qeff: float   # C/m^2
    Ceff: float   # F/m^2
    Cc: float     # F/m^2
    Vth: float    # V


@dataclass(frozen=True)
class BiasPoint:
    vgs: float
    vds: float

    def __post_init__(self):
        if not (math.isfinite(self.vgs) and math.isfinite(self.vds)):
            raise ValueError("bias voltages must be finite")


@dataclass(frozen=True)
class ChargePair:
    q_dp: float  # C/m^2
    q_c: float   # C/m^2


@lru_cache(maxsize=512)
def derive_quantities(card: ModelCard) -> DerivedQuantities:
    """Precompute the bias-independent quantities of the charge equations."""
    g = card.geometry
    phi_t = thermal_voltage(card.temperature)
    r = g.radius_R
    if card.cox_model == "coaxial":
        cox = EPS_SIO2 / (r * math.log(1.0 + g.oxide_thickness_tox / r))
    else:
        cox = EPS_SIO2 / g.oxide_thickness_tox
    qsc = 2.0 * EPS_SI * phi_t / r
    qdep = Q_ELEMENTARY * card.doping_ND * r / 2.0
    eta_cox_phit = card.interface_trap_eta * cox * phi_t
    qeff = qsc * eta_cox_phit / (qsc + eta_cox_phit)
    ceff = 1.0 / (1.0 / cox + r / (2.0 * EPS_SI))
    cc = cox - ceff
    if cc <= 0.0:
        raise InvalidCardError(
            f"corrected electrostatic capacitance Cc = {cc:.3e} F/m^2 <= 0; "
            "card geometry is outside the model's validity"
        )
    vth = (card.flatband_VFB - qdep / cox
           - card.dibl_coefficient * (card.vds_range[1] - card.vds_range[0]))
    return DerivedQuantities(
        thermal_phiT=phi_t, Cox=cox, Qsc=qsc, Qdep=qdep,
        Qeff=qeff, Ceff=ceff, Cc=cc, Vth=vth,
    )


def charge_depletion(dq: DerivedQuantities, card: ModelCard,
                     vg: float, v_channel: float) -> float:
    """Depletion-mode mobile charge density (C/m^2), normalized polarity."""
    eta = card.interface_trap_eta
    y = ((vg - dq.Vth - eta * v_channel) / (eta * dq.thermal_phiT)
         + dq.Qdep / dq.Qsc + math.log(dq.Qsc / dq.Qeff))
    return dq.Qeff * lambert_w0_exp(y)


def charge_complementary(dq: DerivedQuantities, card: ModelCard,
                         vg: float, v_channel: float) -> float:
    """Accumulation-side complementary charge density (C/m^2)."""
    eta = card.interface_trap_eta
    q0 = eta * dq.Cc * dq.thermal_phiT
    y = ((vg - card.flatband_VFB - eta * v_channel) / (eta * dq.thermal_phiT)
         + math.log(dq.Qsc / q0))
    return q0 * lambert_w0_exp(y)


def charges(dq: DerivedQuantities, card: ModelCard,
            vg: float, v_channel: float) -> ChargePair:
    return ChargePair(
        q_dp=charge_depletion(dq, card, vg, v_channel),
        q_c=charge_complementary(dq, card, vg, v_channel),
    )


def _g_of_charges(dq: DerivedQuantities, card: ModelCard,
                  q_dp: float, q_c: float) -> float:
    """Charge functional of the current integral (Eq. 3 bracket), C/m^2."""
    eta = card.interface_trap_eta
    return (q_dp * q_dp / (2.0 * eta * dq.Cox * dq.thermal_phiT) + q_dp
            + q_c * q_c / (2.0 * eta * dq.Cc * dq.thermal_phiT) + 2.0 * q_c)


def saturation_voltage(dq: DerivedQuantities, card: ModelCard,
                       vg: float, vds: float) -> float:
    """Drain saturation voltage used for the pinch-off charges and CLM.

    (vg - Vth)/eta clamped to [0, vds]; vds is the normalized (>= 0) value.
    """
    vdsat = (vg - dq.Vth) / card.interface_trap_eta
    return min(max(vdsat, 0.0), vds)


def effective_length(card: ModelCard, bias: BiasPoint) -> float:
    """Channel length reduced by channel-length modulation (off by default)."""
    geom_l = card.geometry.gate_length_L
    if card.clm_lambda == 0.0:
        return geom_l
    dq = derive_quantities(card)
    vg, vds = _normalize(card, bias.vgs, bias.vds)
    vds = abs(vds)
    vdsat = saturation_voltage(dq, card, vg, vds)
    dl = card.clm_lambda * math.log1p(max(0.0, vds - vdsat) / card.clm_VE)
    if dl >= geom_l:
        # Out-of-range configuration; keep a sliver of channel and continue.
        dl = 0.99 * geom_l
    return geom_l - dl


def effective_mobility(card: ModelCard, bias: BiasPoint) -> float:
    """Velocity-saturation-degraded mobility, monotone nonincreasing in |vds|."""
    mu0 = card.low_field_mobility_mu0
    vsat_term = mu0 * abs(bias.vds) / (card.saturation_velocity_vsat
                                       * card.geometry.gate_length_L)
    return mu0 / (1.0 + vsat_term)


def _normalize(card: ModelCard, vgs: float, vds: float) -> tuple:
    if card.polarity == P_TYPE:
        return -vgs, -vds
    return vgs, vds


def _long_channel_current_norm(dq: DerivedQuantities, card: ModelCard,
                               vg: float, vds: float) -> float:
    """Single-nanowire long-channel current, normalized polarity, any vds sign."""
    if vds < 0.0:
        # Source/drain role swap for a symmetric device.
        return -_long_channel_current_norm(dq, card, vg - vds, -vds)
    r = card.geometry.radius_R
    leff = effective_length(card, BiasPoint(vg, vds))
    mu_eff = effective_mobility(card, BiasPoint(vg, vds))
    cs = charges(dq, card, vg, 0.0)
    cd = charges(dq, card, vg, vds)
    g_src = _g_of_charges(dq, card, cs.q_dp, cs.q_c)
    g_drn = _g_of_charges(dq, card, cd.q_dp, cd.q_c)
    return mu_eff * (2.0 * math.pi * r / leff) * dq.thermal_phiT * (g_src - g_drn)


def long_channel_current(dq: DerivedQuantities, card: ModelCard,
                         bias: BiasPoint) -> float:
    """I_DS,0 for a single nanowire; positive into the drain for n-type."""
    vg, vds = _normalize(card, bias.vgs, bias.vds)
    i = _long_channel_current_norm(dq, card, vg, vds)
    return -i if card.polarity == P_TYPE else i


def _drain_current_norm(dq: DerivedQuantities, card: ModelCard,
                        vg: float, vds: float) -> float:
    if vds < 0.0:
        return -_drain_current_norm(dq, card, vg - vds, -vds)
    i0 = _long_channel_current_norm(dq, card, vg, vds)
    nf = card.nf
    rtot = card.series_RS + card.series_RD
    if rtot == 0.0:
        return i0 * nf
    r = card.geometry.radius_R
    leff = effective_length(card, BiasPoint(vg, vds))
    mu_eff = effective_mobility(card, BiasPoint(vg, vds))
    cs = charges(dq, card, vg, 0.0)
    q_on = cs.q_dp + cs.q_c
    vdoff = saturation_voltage(dq, card, vg, vds)
    coff = charges(dq, card, vg, vdoff)
    q_off = coff.q_dp + coff.q_c
    bracket = q_on - card.resistance_bias_eta1 * (q_on - q_off)
    denom = 1.0 + 2.0 * math.pi * (r / leff) * nf * mu_eff * rtot * bracket
    if denom <= 0.0:
        raise InvalidCardError(
            f"access-resistance denominator {denom:.3e} <= 0 "
            "(eta1/resistance combination is unphysical)"
        )
    return i0 * nf / denom


def drain_current(card: ModelCard, bias: BiasPoint) -> float:
    """Channel current of the full NF-nanowire device (A)."""
    dq = derive_quantities(card)
    vg, vds = _normalize(card, bias.vgs, bias.vds)
    i = _drain_current_norm(dq, card, vg, vds)
    return -i if card.polarity == P_TYPE else i


def _gidl_current_norm(dq: DerivedQuantities, card: ModelCard,
                       vg: float, vds: float) -> float:
    if vds == 0.0 or card.gidl_A == 0.0:
        return 0.0
    if vds < 0.0:
        return -_gidl_current_norm(dq, card, vg - vds, -vds)
    v_segd = vg - vds  # gate-drain voltage across the oxide
    e_segd = dq.Cox * math.sqrt(v_segd * v_segd
                                + (card.gidl_C * vds) ** 2) / EPS_SI
    if e_segd == 0.0:
        return 0.0
    g = card.geometry
    area = 2.0 * math.pi * g.radius_R * g.access_length_LAccess * card.nf
    return (card.gidl_A * area * vds * e_segd * e_segd
            * math.exp(-card.gidl_B / e_segd))


def gidl_current(card: ModelCard, bias: BiasPoint) -> float:
    """Band-to-band tunneling drain leakage of the full device (A)."""
    dq = derive_quantities(card)
    vg, vds = _normalize(card, bias.vgs, bias.vds)
    i = _gidl_current_norm(dq, card, vg, vds)
    return -i if card.polarity == P_TYPE else i


def terminal_current(card: ModelCard, bias: BiasPoint) -> float:
    """Total drain terminal current: channel plus GIDL branch (A).

    Thermionic and Schottky-tunneling branch currents are intentionally not
    modeled; see ``extra_branch_current`` for the extension hook.
    """
    dq = derive_quantities(card)
    vg, vds = _normalize(card, bias.vgs, bias.vds)
    i = _drain_current_norm(dq, card, vg, vds) + _gidl_current_norm(dq, card, vg, vds)
    return -i if card.polarity == P_TYPE else i


def extra_branch_current(card: ModelCard, bias: BiasPoint) -> float:
    """Hook for additional leakage branches (thermionic, Schottky tunneling).

    Not implemented: the source publications for those branch formulas are
    outside this package's scope.  Always returns 0.
    """
    return 0.0


def make_ntype(p_card: ModelCard) -> ModelCard:
    """Derive the n-type card: mobility tripled, polarity flipped, rest equal."""
    if p_card.polarity != P_TYPE:
        raise InvalidCardError("make_ntype expects a p-type card")
    return replace(p_card, polarity=N_TYPE,
                   low_field_mobility_mu0=3.0 * p_card.low_field_mobility_mu0)
