"""Inverter cell netlist builders and load tuning.

Three topologies are supported: a p-type pull-up with a resistive pull-down
(passive load), a p-type pull-up with a p-type current-source pull-down
(active load), and a complementary p/n pair.  The output load follows the
fanout-of-1 convention: a capacitor equal to the cell's own input
capacitance (per-nanowire gate capacitance times the nanowires whose gates
the input drives), scaled by the configured fanout.

Node names: "vdd", "in", "out", bias node "vb" (active load), ground "0".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.optimize import brentq

from .compact_model import BiasPoint, ModelCard, make_ntype, terminal_current
from .circuit import (Capacitor, Netlist, Resistor, Vnwfet,
                      VSourceDC, VSourcePulse)

PASSIVE_LOAD = "passive_load"
ACTIVE_LOAD = "active_load"
COMPLEMENTARY = "complementary"
TOPOLOGIES = (PASSIVE_LOAD, ACTIVE_LOAD, COMPLEMENTARY)


@dataclass(frozen=True)
class InverterOptions:
    vdd: float = 1.0
    freq: float = 1e9
    rise: float = 10e-12
    fall: float = 10e-12
    fanout: float = 1.0
    nf_ratio: int = 3                      # NF_p = nf_ratio * NF_n (complementary)
    load_resistance: Optional[float] = None  # passive load, ohm
    load_cap: Optional[float] = None         # override fanout-derived load, F
    active_bias: Optional[float] = None      # active-load gate bias, V
    nf_load: Optional[int] = None            # active-load device NF
    input_delay: float = 0.0

    def period(self) -> float:
        return 1.0 / self.freq

    def pulse_width(self) -> float:
        # 50% duty: the 50%-crossing midpoints sit half a period apart.
        w = self.period() / 2.0 - (self.rise + self.fall) / 2.0
        if w <= 0:
            raise ValueError("rise+fall too long for the requested frequency")
        return w


class TopologyError(ValueError):
    pass


def input_capacitance(topology: str, nf_drive: int, card_p: ModelCard,
                      options: InverterOptions = InverterOptions()) -> float:
    """Theoretical input capacitance of the cell (F)."""
    cpn = card_p.gate_cap_per_nanowire
    if topology == COMPLEMENTARY:
        return (options.nf_ratio * nf_drive + nf_drive) * cpn
    if topology in (PASSIVE_LOAD, ACTIVE_LOAD):
        return nf_drive * cpn
    raise TopologyError(f"unknown topology {topology!r}")


def build_inverter(topology: str, nf_drive: int, card_p: ModelCard,
                   options: InverterOptions = InverterOptions()) -> Netlist:
    """Netlist for one inverter cell with a pulsed input and fanout load."""
    if topology not in TOPOLOGIES:
        raise TopologyError(f"unknown topology {topology!r}")
    if nf_drive < 1:
        raise TopologyError("nf_drive must be >= 1")
    if card_p.polarity != "p_type":
        raise TopologyError("build_inverter expects a p-type card")

    nl = Netlist()
    nl.add(VSourceDC("vdd", "vdd", "0", options.vdd))
    nl.add(VSourcePulse("vin", "in", "0", v0=0.0, v1=options.vdd,
                        period=options.period(), rise=options.rise,
                        fall=options.fall, width=options.pulse_width(),
                        delay=options.input_delay))

    if topology == COMPLEMENTARY:
        nf_p = options.nf_ratio * nf_drive
        nl.add(Vnwfet("mp", drain="out", gate="in", source="vdd",
                      card=card_p.with_nf(nf_p)))
        nl.add(Vnwfet("mn", drain="out", gate="in", source="0",
                      card=make_ntype(card_p).with_nf(nf_drive)))
    elif topology == PASSIVE_LOAD:
        nl.add(Vnwfet("mp", drain="out", gate="in", source="vdd",
                      card=card_p.with_nf(nf_drive)))
        r = options.load_resistance
        if r is None:
            raise TopologyError("passive_load requires options.load_resistance "
                                "(see default_passive_options)")
        nl.add(Resistor("rload", "out", "0", r))
    else:  # ACTIVE_LOAD
        nl.add(Vnwfet("mp", drain="out", gate="in", source="vdd",
                      card=card_p.with_nf(nf_drive)))
        nf_load = options.nf_load or nf_drive
        vb = options.active_bias
        if vb is None:
            raise TopologyError("active_load requires options.active_bias "
                                "(see solve_active_bias)")
        nl.add(VSourceDC("vbias", "vb", "0", vb))
        # p-type device sinking current from the output toward ground.
        nl.add(Vnwfet("mload", drain="0", gate="vb", source="out",
                      card=card_p.with_nf(nf_load)))

    c_load = options.load_cap
    if c_load is None:
        c_load = options.fanout * input_capacitance(topology, nf_drive,
                                                    card_p, options)
    if c_load > 0:
        nl.add(Capacitor("cload", "out", "0", c_load))
    return nl


def solve_active_bias(card_p: ModelCard, nf_load: int, r_equivalent: float,
                      vdd: float = 1.0) -> float:
    """Gate bias making the current-source load match a passive load.

    The load device sinks I = vdd/2 / r_equivalent at v_out = vdd/2, i.e.
    the same current the equivalent resistor would carry there.
    """
    target = (vdd / 2.0) / r_equivalent
    load = card_p.with_nf(nf_load)
    vout = vdd / 2.0

    def f(vb):
        # source at vout, drain at ground: vgs = vb - vout, vds = -vout
        i = terminal_current(load, BiasPoint(vgs=vb - vout, vds=-vout))
        return abs(i) - target

    lo, hi = -vdd, vout
    if f(lo) * f(hi) > 0:
        raise TopologyError("cannot bias active load to the requested current")
    return brentq(f, lo, hi, xtol=1e-9)


def default_passive_options(card_p: ModelCard, nf: int,
                            vdd: float = 1.0, freq: float = 1e9,
                            degradation: float = 0.15,
                            overshoot: float = 0.15,
                            **overrides) -> InverterOptions:
    """Passive-load options tuned for given logic-level margins.

    The load resistor sets the static logic-high divider at
    (1 - degradation)*vdd; the load capacitor is sized so the RC discharge
    leaves `overshoot`*vdd on the output at the end of the low half-period.
    """
    if not 0 < overshoot < 1 - degradation:
        raise ValueError("need 0 < overshoot < 1 - degradation")
    r = passive_divider_resistance(card_p, nf, vdd, (1.0 - degradation) * vdd)
    half = 0.5 / freq
    c = half / (r * math.log((1.0 - degradation) / overshoot))
    return InverterOptions(vdd=vdd, freq=freq, load_resistance=r,
                           load_cap=c, **overrides)


def default_active_options(card_p: ModelCard, nf: int,
                           vdd: float = 1.0, freq: float = 1e9,
                           **overrides) -> InverterOptions:
    """Active-load options: current source matched to the default passive load."""
    passive = default_passive_options(card_p, nf, vdd, freq)
    vb = solve_active_bias(card_p, nf, passive.load_resistance, vdd)
    return InverterOptions(vdd=vdd, freq=freq, active_bias=vb, nf_load=nf,
                           load_cap=passive.load_cap, **overrides)


def pullup_resistance(card_p: ModelCard, nf: int, vdd: float,
                      vout: float) -> float:
    """Effective pull-up resistance (vdd - vout)/I at input low."""
    i = abs(terminal_current(card_p.with_nf(nf),
                             BiasPoint(vgs=-vdd, vds=vout - vdd)))
    return (vdd - vout) / i


def passive_divider_resistance(card_p: ModelCard, nf: int, vdd: float,
                               high_level: float) -> float:
    """Load resistor such that the static logic-high settles at high_level.

    Solves the pull-up/resistor divider I_p(v) = v/R at v = high_level.
    """
    i = abs(terminal_current(card_p.with_nf(nf),
                             BiasPoint(vgs=-vdd, vds=high_level - vdd)))
    return high_level / i
