"""Static and dynamic figures of merit for VNWFET inverter cells.

Static metrics come straight from the compact model (on/off currents,
leakage-vs-NF slope and density); dynamic metrics are extracted from
transient waveforms (50%-crossing propagation delays, logic-level
degradation, switching energy) and a cascade-feasibility matrix over
(NF, fanout).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cells import COMPLEMENTARY, InverterOptions, build_inverter
from .circuit import SimulationError, TransientConfig, Waveform, transient
from .compact_model import BiasPoint, ModelCard, terminal_current


class WaveformError(ValueError):
    """Waveform unsuitable for the requested extraction."""


@dataclass(frozen=True)
class StaticReport:
    i_on: float
    i_off: float
    ratio: float
    leakage_slope: float = float("nan")    # A per nanowire
    leakage_density: float = float("nan")  # A/m^2


@dataclass(frozen=True)
class DynamicReport:
    t_plh: float
    t_phl: float
    level_degradation_high: float
    overshoot_low: float
    energy_per_transition: float
    energy_per_nanowire: float


def _on_off_biases(card: ModelCard, vdd: float):
    """Bias points for input A=0 (pull-up on) and A=1 (pull-up off)."""
    if card.polarity == "p_type":
        return (BiasPoint(vgs=-vdd, vds=-vdd), BiasPoint(vgs=0.0, vds=-vdd))
    return (BiasPoint(vgs=vdd, vds=vdd), BiasPoint(vgs=0.0, vds=vdd))


def ion_ioff(card: ModelCard, vdd: float = 1.0) -> StaticReport:
    """On/off currents of the full device at the rail biases."""
    b_on, b_off = _on_off_biases(card, vdd)
    i_on = abs(terminal_current(card, b_on))
    i_off = abs(terminal_current(card, b_off))
    if i_off == 0.0:
        warnings.warn("zero off-current; reporting infinite on/off ratio")
        return StaticReport(i_on=i_on, i_off=i_off, ratio=float("inf"))
    return StaticReport(i_on=i_on, i_off=i_off, ratio=i_on / i_off)


def leakage_slope(card: ModelCard, nf_list, vdd: float = 1.0) -> StaticReport:
    """Least-squares slope of off-current vs NF, plus leakage density.

    Density divides the per-nanowire slope by the nanowire cross-section
    (pi * R^2), the footprint the paper's per-area figure refers to.
    """
    nf_list = [int(n) for n in nf_list]
    if len(set(nf_list)) < 2:
        raise ValueError("need at least two distinct NF values")
    _, b_off = _on_off_biases(card, vdd)
    b_on, _ = _on_off_biases(card, vdd)
    ioffs = [abs(terminal_current(card.with_nf(n), b_off)) for n in nf_list]
    slope = float(np.polyfit(nf_list, ioffs, 1)[0])
    area = math.pi * card.geometry.radius_R ** 2
    rep = ion_ioff(card, vdd)
    return StaticReport(i_on=rep.i_on, i_off=rep.i_off, ratio=rep.ratio,
                        leakage_slope=slope, leakage_density=slope / area)


def _crossings(wf: Waveform, level: float) -> list:
    """(time, direction) of linear-interpolated crossings of `level`."""
    t, v = wf.times, wf.values
    out = []
    for i in range(len(v) - 1):
        v0, v1 = v[i] - level, v[i + 1] - level
        if v0 == 0.0 and i == 0:
            continue
        if v0 < 0.0 <= v1 or v0 > 0.0 >= v1:
            frac = v0 / (v0 - v1) if v0 != v1 else 0.0
            tc = t[i] + frac * (t[i + 1] - t[i])
            out.append((tc, 1 if v1 > v0 else -1))
    return out


def propagation_delay(vin: Waveform, vout: Waveform, vdd: float) -> tuple:
    """(t_plh, t_phl): 50%-to-50% delays, median over the observed edges.

    Each output crossing is paired with the nearest preceding input
    crossing (the causing edge).
    """
    half = vdd / 2.0
    in_x = _crossings(vin, half)
    out_x = _crossings(vout, half)
    if not in_x or not out_x:
        raise WaveformError("no 50% crossing found in input or output")
    plh, phl = [], []
    for tc, direction in out_x:
        prev = [ti for ti, _ in in_x if ti <= tc]
        if not prev:
            continue
        d = tc - prev[-1]
        (plh if direction > 0 else phl).append(d)
    if not plh or not phl:
        raise WaveformError("output does not transition in both directions")
    return float(np.median(plh)), float(np.median(phl))


def level_degradation(vout: Waveform, vdd: float,
                      settle_fraction: float = 0.5) -> tuple:
    """(high_degradation, low_overshoot) over the settled tail of vout.

    The last `settle_fraction` of the waveform is treated as settled; the
    steady high is its maximum and the steady low its minimum.  A warning
    is emitted when the first and second halves of the tail disagree by
    more than 2% of vdd (unsettled waveform).
    """
    t = vout.times
    mask = t >= t[0] + (1.0 - settle_fraction) * (t[-1] - t[0])
    tail = vout.values[mask]
    if tail.size < 8:
        raise WaveformError("waveform too short for level extraction")
    mid = tail.size // 2
    for part_a, part_b in ((tail[:mid], tail[mid:]),):
        if (abs(part_a.max() - part_b.max()) > 0.02 * vdd
                or abs(part_a.min() - part_b.min()) > 0.02 * vdd):
            warnings.warn("waveform not settled; level extraction may be off")
    high = float(tail.max())
    low = float(tail.min())
    return (vdd - high) / vdd, max(low, 0.0) / vdd


def dynamic_energy(supply_current: Waveform, vdd: float,
                   nf_total: int) -> tuple:
    """(energy_per_transition, energy_per_nanowire) from the supply charge.

    The waveform must cover exactly one low-high output transition window;
    the charge is the time integral of the supply current over it.
    """
    q = abs(float(np.trapezoid(supply_current.values, supply_current.times)))
    if q == 0.0:
        raise WaveformError("no charge delivered in the given window")
    energy = q * vdd
    return energy, energy / nf_total


def window(wf: Waveform, t0: float, t1: float) -> Waveform:
    """Clip a waveform to [t0, t1], interpolating the endpoints."""
    inner = (wf.times > t0) & (wf.times < t1)
    times = np.concatenate(([t0], wf.times[inner], [t1]))
    values = np.interp(times, wf.times, wf.values)
    return Waveform(times, values, wf.label)


# --------------------------------------------------------------------------
# cell-level extraction

def simulate_inverter(card_p: ModelCard, topology: str, nf_drive: int,
                      options: InverterOptions = InverterOptions(),
                      n_periods: float = 2.0,
                      dt: float = 0.1e-12) -> dict:
    nl = build_inverter(topology, nf_drive, card_p, options)
    cfg = TransientConfig(t_stop=n_periods * options.period(),
                          dt_initial=dt, dt_max=dt)
    return transient(nl, cfg)


def dynamic_report(card_p: ModelCard, topology: str, nf_drive: int,
                   options: InverterOptions = InverterOptions(),
                   dt: float = 0.1e-12,
                   n_periods: float = 2.0,
                   nf_total: int | None = None) -> DynamicReport:
    """Transient-simulate one cell and extract all dynamic metrics.

    Energy integrates the rail current over the half-period containing the
    low-high output transition (input falling edge of the last full period);
    the per-nanowire value divides by the cell's drive parameter NF unless
    nf_total is given.
    """
    wfs = simulate_inverter(card_p, topology, nf_drive, options,
                            n_periods=n_periods, dt=dt)
    vin, vout = wfs["v(in)"], wfs["v(out)"]
    t_plh, t_phl = propagation_delay(vin, vout, options.vdd)
    deg_high, over_low = level_degradation(vout, options.vdd)
    # last full period's input falling edge starts the low-high output window
    t_fall = (options.input_delay
              + (math.ceil(n_periods) - 1) * options.period()
              + options.rise + options.pulse_width())
    half = options.period() / 2.0
    isup = window(wfs["i(vdd)"], t_fall, t_fall + half)
    energy, per_nw = dynamic_energy(isup, options.vdd,
                                    nf_total if nf_total else nf_drive)
    return DynamicReport(t_plh=t_plh, t_phl=t_phl,
                         level_degradation_high=deg_high,
                         overshoot_low=over_low,
                         energy_per_transition=energy,
                         energy_per_nanowire=per_nw)


@dataclass(frozen=True)
class FanoutCell:
    nf: int
    fanout: float
    feasible: bool
    charge_time: float     # input-edge start to 90% output crossing, s
    error: str = ""


def fanout_analysis(card_p: ModelCard, nf_range, fanout_range,
                    freq: float = 1e9,
                    threshold: float = 0.9,
                    charge_time_limit: float = 20e-12,
                    dt: float = 0.1e-12) -> list:
    """Cascade-feasibility matrix of the self-loaded complementary inverter.

    A cell is feasible when its output completes the low-high swing (reaches
    `threshold`*vdd) within `charge_time_limit` of the driving input edge
    starting, i.e. the output edge keeps pace with the input edge it must
    reproduce for the next stage.  The output must in any case settle within
    its half-period.
    """
    nf_range = [int(n) for n in nf_range]
    fanout_range = list(fanout_range)
    if not nf_range or not fanout_range:
        raise ValueError("nf_range and fanout_range must be nonempty")
    if freq <= 0:
        raise ValueError("freq must be > 0")
    cells = []
    for nf in nf_range:
        for fo in fanout_range:
            opts = InverterOptions(freq=freq, fanout=fo)
            try:
                wfs = simulate_inverter(card_p, COMPLEMENTARY, nf, opts,
                                        n_periods=1.0, dt=dt)
            except SimulationError as exc:
                cells.append(FanoutCell(nf, fo, False, float("nan"), str(exc)))
                continue
            vout = wfs["v(out)"]
            t_fall = opts.input_delay + opts.rise + opts.pulse_width()
            half = opts.period() / 2.0
            level = threshold * opts.vdd
            seg = window(vout, t_fall, t_fall + half)
            up = [tc for tc, d in _crossings(seg, level) if d > 0]
            if not up:
                cells.append(FanoutCell(nf, fo, False, float("inf")))
                continue
            charge_time = up[0] - t_fall
            cells.append(FanoutCell(nf, fo, charge_time <= charge_time_limit,
                                    charge_time))
    return cells
