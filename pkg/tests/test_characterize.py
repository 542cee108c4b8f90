"""Metric extraction checked on synthetic waveforms with known answers."""

import math
import warnings

import numpy as np
import pytest

from vnwfet.circuit import Waveform
from vnwfet.characterize import (WaveformError, dynamic_energy, ion_ioff,
                                 leakage_slope, level_degradation,
                                 propagation_delay, window)
from vnwfet.compact_model import BiasPoint, terminal_current
from conftest import make_card


def ramp_wave(t_cross, vdd=1.0, direction=+1, t_end=2e-9, n=4001):
    """Waveform crossing vdd/2 exactly at t_cross with a 10ps edge."""
    t = np.linspace(0.0, t_end, n)
    edge = (t - (t_cross - 5e-12)) / 10e-12
    v = np.clip(edge, 0.0, 1.0) * vdd
    if direction < 0:
        v = vdd - v
    return Waveform(t, v, "v(x)")


class TestPropagationDelay:
    def test_known_shift_recovered(self):
        t = np.linspace(0.0, 2e-9, 80001)
        vin = np.where((t > 0.1e-9) & (t < 1.1e-9), 0.0, 1.0)
        vout = np.interp(t - 5e-12, t, 1.0 - vin)  # inverted, 5ps later
        t_plh, t_phl = propagation_delay(Waveform(t, vin, "in"),
                                         Waveform(t, vout, "out"), 1.0)
        assert t_plh == pytest.approx(5e-12, abs=0.1e-12)
        assert t_phl == pytest.approx(5e-12, abs=0.1e-12)

    def test_both_directions_required(self):
        vin = ramp_wave(0.1e-9, direction=-1)
        vout = ramp_wave(0.11e-9, direction=+1)  # never falls
        with pytest.raises(WaveformError):
            propagation_delay(vin, vout, 1.0)

    def test_two_edges_paired_with_causes(self):
        t = np.linspace(0.0, 2e-9, 8001)
        # input: fall at 0.1ns, rise at 1.1ns; output mirrors 7ps later
        vin = np.where((t > 0.1e-9) & (t < 1.1e-9), 0.0, 1.0)
        vout = np.where((t > 0.107e-9) & (t < 1.109e-9), 1.0, 0.0)
        plh, phl = propagation_delay(Waveform(t, vin, "in"),
                                     Waveform(t, vout, "out"), 1.0)
        assert plh == pytest.approx(7e-12, abs=0.3e-12)
        assert phl == pytest.approx(9e-12, abs=0.3e-12)

    def test_flat_waveform_rejected(self):
        t = np.linspace(0, 1e-9, 100)
        flat = Waveform(t, np.zeros_like(t), "x")
        with pytest.raises(WaveformError):
            propagation_delay(flat, flat, 1.0)


class TestLevelDegradation:
    def test_constructed_levels(self):
        t = np.linspace(0, 2e-9, 2001)
        # settled square wave between 0.12 and 0.83
        v = np.where((t % 1e-9) < 0.5e-9, 0.83, 0.12)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            deg, over = level_degradation(Waveform(t, v, "out"), 1.0)
        assert deg == pytest.approx(0.17, abs=1e-9)
        assert over == pytest.approx(0.12, abs=1e-9)

    def test_unsettled_warns(self):
        t = np.linspace(0, 2e-9, 2001)
        v = np.linspace(0.0, 1.0, 2001)  # still drifting
        with pytest.warns(UserWarning, match="not settled"):
            level_degradation(Waveform(t, v, "out"), 1.0)

    def test_too_short_rejected(self):
        t = np.linspace(0, 1e-9, 5)
        with pytest.raises(WaveformError):
            level_degradation(Waveform(t, np.ones(5), "out"), 1.0)


class TestDynamicEnergy:
    def test_rectangular_pulse_charge(self):
        t = np.linspace(0, 1e-10, 1001)
        i = np.where(t < 5e-11, 2e-6, 0.0)  # 2uA for 50ps -> 0.1fC
        e, per = dynamic_energy(Waveform(t, i, "i(vdd)"), 1.0, 4)
        assert e == pytest.approx(1e-16, rel=1e-2)
        assert per == pytest.approx(e / 4)

    def test_zero_charge_rejected(self):
        t = np.linspace(0, 1e-10, 100)
        with pytest.raises(WaveformError):
            dynamic_energy(Waveform(t, np.zeros(100), "i"), 1.0, 1)


class TestWindow:
    def test_endpoints_interpolated(self):
        t = np.linspace(0, 1e-9, 11)
        wf = Waveform(t, t * 1e9, "x")  # v = t in ns
        w = window(wf, 0.25e-9, 0.65e-9)
        assert w.times[0] == pytest.approx(0.25e-9)
        assert w.times[-1] == pytest.approx(0.65e-9)
        assert w.values[0] == pytest.approx(0.25, rel=1e-9)
        # integral preserved on the clipped region
        assert np.trapezoid(w.values, w.times) == pytest.approx(
            0.5 * (0.65e-9 ** 2 - 0.25e-9 ** 2) * 1e9, rel=1e-9)


class TestStaticReports:
    def test_ion_ioff_matches_model(self, card1):
        rep = ion_ioff(card1)
        i_on = abs(terminal_current(card1, BiasPoint(-1.0, -1.0)))
        i_off = abs(terminal_current(card1, BiasPoint(0.0, -1.0)))
        assert rep.i_on == pytest.approx(i_on, rel=1e-12)
        assert rep.i_off == pytest.approx(i_off, rel=1e-12)
        assert rep.ratio == pytest.approx(i_on / i_off, rel=1e-12)

    def test_ntype_biases_mirrored(self):
        from vnwfet.compact_model import make_ntype
        n = make_ntype(make_card(gidl_A=1e-2, rs=700.0, rd=700.0))
        rep = ion_ioff(n)
        assert rep.i_on > rep.i_off > 0

    def test_leakage_slope_exact_for_linear_data(self, card):
        """With RS=RD=0 the off-current is exactly linear in NF."""
        import dataclasses
        ideal = dataclasses.replace(card, series_RS=0.0, series_RD=0.0)
        rep = leakage_slope(ideal, [10, 30, 100, 300])
        i1 = abs(terminal_current(ideal.with_nf(1), BiasPoint(0.0, -1.0)))
        assert rep.leakage_slope == pytest.approx(i1, rel=1e-9)
        area = math.pi * (8e-9) ** 2
        assert rep.leakage_density == pytest.approx(i1 / area, rel=1e-9)

    def test_leakage_slope_needs_two_points(self, card):
        with pytest.raises(ValueError):
            leakage_slope(card, [16, 16])
