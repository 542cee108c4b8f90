"""Circuit engine checks against closed-form and bisection oracles."""

import math

import numpy as np
import pytest

from vnwfet.circuit import (Capacitor, Netlist, NetlistError, Resistor,
                            SimulationError, TransientConfig, Vnwfet,
                            VSourceDC, VSourcePulse, Waveform, dc_operating_point,
                            dc_sweep, transient, waveforms_to_csv)
from vnwfet.compact_model import BiasPoint, terminal_current
from conftest import make_card


def rc_netlist(r=1e3, c=1e-12, v=1.0, rise=1e-12):
    """Series RC driven by a step-like pulse (starts at 0, rises at t=0)."""
    nl = Netlist()
    nl.add(VSourcePulse("vin", "a", "0", v0=0.0, v1=v, period=1.0,
                        rise=rise, fall=rise, width=0.4, delay=0.0))
    nl.add(Resistor("r1", "a", "b", r))
    nl.add(Capacitor("c1", "b", "0", c))
    return nl


class TestDcOperatingPoint:
    def test_resistive_divider_exact(self):
        nl = Netlist()
        nl.add(VSourceDC("v1", "top", "0", 3.0))
        nl.add(Resistor("r1", "top", "mid", 1e3))
        nl.add(Resistor("r2", "mid", "0", 2e3))
        op = dc_operating_point(nl)
        assert op["mid"] == pytest.approx(2.0, rel=1e-12)
        assert op["i(v1)"] == pytest.approx(-1e-3, rel=1e-12)

    def test_fet_pullup_matches_bisection_oracle(self):
        """Output node of p-FET + resistor solved independently by bisection."""
        card = make_card(vfb=2.24, mu0=2.27e-4, rs=713.0, rd=713.0, nf=16)
        r_load = 2e5
        nl = Netlist()
        nl.add(VSourceDC("vdd", "vdd", "0", 1.0))
        nl.add(VSourceDC("vin", "in", "0", 0.0))
        nl.add(Vnwfet("mp", drain="out", gate="in", source="vdd", card=card))
        nl.add(Resistor("rl", "out", "0", r_load))
        op = dc_operating_point(nl)

        def kcl(v_out):
            i_fet = terminal_current(card, BiasPoint(vgs=-1.0, vds=v_out - 1.0))
            return -i_fet - v_out / r_load  # current into node minus out

        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if kcl(mid) > 0:
                lo = mid
            else:
                hi = mid
        assert op["out"] == pytest.approx(0.5 * (lo + hi), abs=1e-9)

    def test_capacitors_open_in_dc(self):
        nl = Netlist()
        nl.add(VSourceDC("v1", "a", "0", 1.0))
        nl.add(Resistor("r1", "a", "b", 1e3))
        nl.add(Capacitor("c1", "b", "0", 1e-12))
        op = dc_operating_point(nl)
        assert op["b"] == pytest.approx(1.0, rel=1e-12)

    def test_floating_node_rejected(self):
        nl = Netlist()
        nl.add(VSourceDC("v1", "a", "0", 1.0))
        nl.add(Resistor("r1", "b", "c", 1e3))
        with pytest.raises(NetlistError):
            nl.validate()


class TestDcSweep:
    def test_matches_terminal_current_pointwise(self):
        card = make_card(vfb=2.24, mu0=2.27e-4, rs=700.0, rd=700.0)
        nl = Netlist()
        nl.add(VSourceDC("vd", "d", "0", -1.0))
        nl.add(VSourceDC("vg", "g", "0", 0.0))
        nl.add(Vnwfet("m1", drain="d", gate="g", source="0", card=card))
        vgs = np.linspace(0.0, -1.2, 25)
        out = dc_sweep(nl, "vg", vgs)
        i_vd = out["i(vd)"]
        for v in vgs:
            direct = terminal_current(card, BiasPoint(vgs=float(v), vds=-1.0))
            assert -i_vd.at(v) == pytest.approx(direct, rel=1e-9, abs=1e-18)

    def test_empty_sweep_rejected(self):
        nl = Netlist()
        nl.add(VSourceDC("v1", "a", "0", 1.0))
        nl.add(Resistor("r1", "a", "0", 1.0))
        with pytest.raises(NetlistError, match="empty"):
            dc_sweep(nl, "v1", [])

    def test_unknown_source_rejected(self):
        nl = Netlist()
        nl.add(VSourceDC("v1", "a", "0", 1.0))
        nl.add(Resistor("r1", "a", "0", 1.0))
        with pytest.raises(NetlistError, match="vx"):
            dc_sweep(nl, "vx", [0.0])


class TestTransient:
    def test_rc_charge_matches_analytic(self):
        r, c = 1e3, 1e-12  # tau = 1ns
        nl = rc_netlist(r, c)
        cfg = TransientConfig(t_stop=5e-9, dt_initial=1e-12, dt_max=1e-12)
        out = transient(nl, cfg)
        vb = out["v(b)"]
        for t in (0.5e-9, 1e-9, 2e-9, 4e-9):
            expect = 1.0 - math.exp(-t / (r * c))
            assert vb.at(t) == pytest.approx(expect, abs=5e-4)

    def test_backward_euler_converges_to_same_solution(self):
        nl = rc_netlist()
        kw = dict(t_stop=3e-9, dt_initial=0.5e-12, dt_max=0.5e-12)
        v_trap = transient(nl, TransientConfig(**kw))["v(b)"]
        v_be = transient(nl, TransientConfig(method="backward_euler", **kw))["v(b)"]
        t = np.linspace(0.1e-9, 3e-9, 50)
        assert np.max(np.abs(v_trap.at(t) - v_be.at(t))) < 2e-3

    def test_capacitor_charge_conservation(self):
        """Integral of capacitor current equals C * delta V (trapezoid exact)."""
        nl = rc_netlist(r=1e3, c=1e-12)
        cfg = TransientConfig(t_stop=5e-9, dt_initial=1e-12, dt_max=1e-12)
        out = transient(nl, cfg)
        ic, vb = out["i(c1)"], out["v(b)"]
        q = np.trapezoid(ic.values, ic.times)
        dv = vb.values[-1] - vb.values[0]
        assert q == pytest.approx(1e-12 * dv, rel=1e-6)

    def test_adaptive_matches_fixed_step(self):
        nl = rc_netlist()
        fixed = transient(nl, TransientConfig(t_stop=3e-9, dt_initial=1e-12,
                                              dt_max=1e-12))["v(b)"]
        adaptive = transient(nl, TransientConfig(t_stop=3e-9, dt_initial=1e-12,
                                                 dt_max=50e-12))["v(b)"]
        t = np.linspace(0.0, 3e-9, 200)
        assert np.max(np.abs(fixed.at(t) - adaptive.at(t))) < 1e-3
        assert len(adaptive.times) < len(fixed.times) / 2

    def test_starts_from_dc_operating_point(self):
        # a DC source through R into C: transient must start settled
        nl = Netlist()
        nl.add(VSourceDC("v1", "a", "0", 1.0))
        nl.add(Resistor("r1", "a", "b", 1e3))
        nl.add(Capacitor("c1", "b", "0", 1e-12))
        out = transient(nl, TransientConfig(t_stop=1e-9, dt_initial=1e-12,
                                            dt_max=1e-12))
        assert np.max(np.abs(out["v(b)"].values - 1.0)) < 1e-9

    def test_breakpoint_alignment_catches_fast_edge(self):
        # 1ps edge must be resolved even with a 10ps step via breakpoints
        nl = rc_netlist(rise=1e-12)
        out = transient(nl, TransientConfig(t_stop=1e-9, dt_initial=1e-13,
                                            dt_max=10e-12))
        va = out["v(a)"]
        k = np.searchsorted(va.times, 1e-12)
        assert va.values[k] == pytest.approx(1.0, abs=1e-6)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TransientConfig(t_stop=1e-9, dt_initial=2e-9)
        with pytest.raises(ValueError):
            TransientConfig(t_stop=1e-9, method="magic")

    def test_pulse_timing_validation(self):
        with pytest.raises(ValueError):
            VSourcePulse("v", "a", "0", v0=0, v1=1, period=1e-9,
                         rise=0.6e-9, fall=0.6e-9, width=0.1e-9)


class TestWaveformCsv:
    def test_header_and_round_trip(self, tmp_path):
        t = np.linspace(0, 1e-9, 5)
        wfs = [Waveform(t, np.sin(1e9 * t), "v(out)"),
               Waveform(t, np.cos(1e9 * t), "i(vdd)")]
        path = tmp_path / "w.csv"
        waveforms_to_csv(path, wfs)
        lines = path.read_text().splitlines()
        assert lines[0] == "time_s,v(out),i(vdd)"
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        assert np.array_equal(data[:, 0], t)
        assert np.array_equal(data[:, 1], wfs[0].values)

    def test_mismatched_time_base_rejected(self, tmp_path):
        w1 = Waveform(np.array([0.0, 1.0]), np.array([0.0, 1.0]), "a")
        w2 = Waveform(np.array([0.0, 2.0]), np.array([0.0, 1.0]), "b")
        with pytest.raises(ValueError):
            waveforms_to_csv(tmp_path / "w.csv", [w1, w2])

    def test_waveform_validation(self):
        with pytest.raises(ValueError):
            Waveform(np.array([0.0, 0.0]), np.array([1.0, 2.0]), "x")
        with pytest.raises(ValueError):
            Waveform(np.array([0.0, 1.0]), np.array([1.0]), "x")
