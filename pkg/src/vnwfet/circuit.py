"""Netlist representation and a small nodal circuit simulator.

Supports DC operating point (Newton with gmin-ramp and source-stepping
fallbacks), DC sweeps, and implicit transient integration (trapezoidal with
backward-Euler startup, or pure backward Euler).  Unknowns are the
non-ground node voltages plus one branch current per voltage source.

The VNWFET element contributes a nonlinear drain-source current (channel +
GIDL from the compact model) and, in transient, a lumped gate-to-ground
capacitance of NF * gate_cap_per_nanowire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .compact_model import (
    ModelCard,
    _drain_current_norm,
    _gidl_current_norm,
    derive_quantities,
)
from .numerics import ConvergenceError, SolverConfig

GROUND = "0"


class NetlistError(ValueError):
    """Structural problem in a netlist."""


class SimulationError(RuntimeError):
    """Analysis failed to converge."""


# --------------------------------------------------------------------------
# elements

@dataclass(frozen=True)
class Resistor:
    name: str
    n1: str
    n2: str
    ohms: float

    def __post_init__(self):
        if self.ohms <= 0:
            raise NetlistError(f"{self.name}: resistance must be > 0")


@dataclass(frozen=True)
class Capacitor:
    name: str
    n1: str
    n2: str
    farads: float

    def __post_init__(self):
        if self.farads <= 0:
            raise NetlistError(f"{self.name}: capacitance must be > 0")


@dataclass(frozen=True)
class VSourceDC:
    name: str
    npos: str
    nneg: str
    volts: float

    def value(self, t: float) -> float:
        return self.volts


@dataclass(frozen=True)
class VSourcePulse:
    name: str
    npos: str
    nneg: str
    v0: float
    v1: float
    period: float
    rise: float
    fall: float
    width: float
    delay: float = 0.0

    def __post_init__(self):
        if self.rise <= 0 or self.fall <= 0:
            raise NetlistError(f"{self.name}: rise and fall must be > 0")
        if self.rise + self.fall + self.width > self.period:
            raise NetlistError(f"{self.name}: rise+fall+width exceeds period")

    def value(self, t: float) -> float:
        if t < self.delay:
            return self.v0
        tau = math.fmod(t - self.delay, self.period)
        if tau < self.rise:
            return self.v0 + (self.v1 - self.v0) * tau / self.rise
        if tau < self.rise + self.width:
            return self.v1
        if tau < self.rise + self.width + self.fall:
            return self.v1 + (self.v0 - self.v1) * (tau - self.rise - self.width) / self.fall
        return self.v0

    def breakpoints(self, t_stop: float) -> list:
        pts = []
        k = 0
        while True:
            base = self.delay + k * self.period
            if base > t_stop:
                break
            for off in (0.0, self.rise, self.rise + self.width,
                        self.rise + self.width + self.fall):
                t = base + off
                if 0.0 < t < t_stop:
                    pts.append(t)
            k += 1
        return pts


@dataclass(frozen=True)
class Vnwfet:
    name: str
    drain: str
    gate: str
    source: str
    card: ModelCard


Element = Resistor | Capacitor | VSourceDC | VSourcePulse | Vnwfet


@dataclass
class Netlist:
    elements: list = field(default_factory=list)
    ground: str = GROUND

    def add(self, element: Element) -> None:
        self.elements.append(element)

    def nodes(self) -> list:
        seen = []
        for e in self.elements:
            for n in _terminals(e):
                if n not in seen:
                    seen.append(n)
        return seen

    def validate(self) -> None:
        if not self.elements:
            raise NetlistError("empty netlist")
        names = [e.name for e in self.elements]
        if len(set(names)) != len(names):
            raise NetlistError("duplicate element names")
        if self.ground not in self.nodes():
            raise NetlistError(f"ground node '{self.ground}' is not connected")
        if not any(isinstance(e, (VSourceDC, VSourcePulse)) for e in self.elements):
            raise NetlistError("netlist has no source")
        # every node must be galvanically reachable from ground
        reach = {self.ground}
        frontier = True
        while frontier:
            frontier = False
            for e in self.elements:
                terms = set(_terminals(e))
                if terms & reach and not terms <= reach:
                    reach |= terms
                    frontier = True
        floating = [n for n in self.nodes() if n not in reach]
        if floating:
            raise NetlistError(f"nodes not connected to ground: {floating}")

    def sources(self) -> list:
        return [e for e in self.elements if isinstance(e, (VSourceDC, VSourcePulse))]


def _terminals(e: Element) -> tuple:
    if isinstance(e, Vnwfet):
        return (e.drain, e.gate, e.source)
    if isinstance(e, (VSourceDC, VSourcePulse)):
        return (e.npos, e.nneg)
    return (e.n1, e.n2)


# --------------------------------------------------------------------------
# waveforms

@dataclass
class Waveform:
    times: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError(f"{self.label}: times/values length mismatch")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError(f"{self.label}: times must be strictly increasing")

    def at(self, t) -> np.ndarray:
        return np.interp(t, self.times, self.values)


def waveforms_to_csv(path, waveforms: Iterable[Waveform]) -> None:
    """Write waveforms sharing one time base as `time_s,<label>...` CSV."""
    wfs = list(waveforms)
    times = wfs[0].times
    for wf in wfs[1:]:
        if wf.times.shape != times.shape or not np.array_equal(wf.times, times):
            raise ValueError("waveforms do not share a common time base")
    header = "time_s," + ",".join(wf.label for wf in wfs)
    data = np.column_stack([times] + [wf.values for wf in wfs])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


# --------------------------------------------------------------------------
# device evaluation helper

class _FetEval:
    """Cached per-instance evaluator: current into the drain + derivatives."""

    _DV = 1e-7  # finite-difference step, V

    def __init__(self, fet: Vnwfet):
        self.card = fet.card
        self.dq = derive_quantities(fet.card)
        self.sign = -1.0 if fet.card.polarity == "p_type" else 1.0
        self.gate_cap = fet.card.gate_cap_per_nanowire * fet.card.nf

    def current(self, vgs: float, vds: float) -> float:
        s = self.sign
        vg, vd = s * vgs, s * vds
        i = (_drain_current_norm(self.dq, self.card, vg, vd)
             + _gidl_current_norm(self.dq, self.card, vg, vd))
        return s * i

    def current_and_derivs(self, vgs: float, vds: float) -> tuple:
        h = self._DV
        i0 = self.current(vgs, vds)
        gm = (self.current(vgs + h, vds) - self.current(vgs - h, vds)) / (2 * h)
        gds = (self.current(vgs, vds + h) - self.current(vgs, vds - h)) / (2 * h)
        return i0, gm, gds


# --------------------------------------------------------------------------
# MNA assembly

class _Mna:
    def __init__(self, netlist: Netlist):
        netlist.validate()
        self.netlist = netlist
        self.node_names = [n for n in sorted(netlist.nodes()) if n != netlist.ground]
        self.node_index = {n: i for i, n in enumerate(self.node_names)}
        self.node_index[netlist.ground] = -1
        self.vsources = netlist.sources()
        self.nn = len(self.node_names)
        self.size = self.nn + len(self.vsources)
        self.fets = [(e, _FetEval(e)) for e in netlist.elements
                     if isinstance(e, Vnwfet)]
        self.resistors = [e for e in netlist.elements if isinstance(e, Resistor)]
        self.capacitors = [e for e in netlist.elements if isinstance(e, Capacitor)]

    def v_of(self, x: np.ndarray, node: str) -> float:
        i = self.node_index[node]
        return 0.0 if i < 0 else x[i]

    def assemble(self, x, t, src_scale=1.0, gmin=0.0,
                 cap_companion=None):
        """Residual f and jacobian J at state x.

        f[0:nn]   : KCL, net current leaving each node.
        f[nn + k] : voltage-source constraint of source k.
        cap_companion: None for DC (capacitors open) or a dict
        {cap.name: (geq, ieq)} with i = geq*dv - ieq for transient.
        """
        f = np.zeros(self.size)
        jac = np.zeros((self.size, self.size))

        def stamp_g(a: int, b: int, g: float):
            if a >= 0:
                jac[a, a] += g
            if b >= 0:
                jac[b, b] += g
            if a >= 0 and b >= 0:
                jac[a, b] -= g
                jac[b, a] -= g

        for r in self.resistors:
            a, b = self.node_index[r.n1], self.node_index[r.n2]
            g = 1.0 / r.ohms
            dv = (x[a] if a >= 0 else 0.0) - (x[b] if b >= 0 else 0.0)
            i = g * dv
            if a >= 0:
                f[a] += i
            if b >= 0:
                f[b] -= i
            stamp_g(a, b, g)

        for c in self.capacitors:
            if cap_companion is None:
                continue
            geq, ieq = cap_companion[c.name]
            a, b = self.node_index[c.n1], self.node_index[c.n2]
            dv = (x[a] if a >= 0 else 0.0) - (x[b] if b >= 0 else 0.0)
            i = geq * dv - ieq
            if a >= 0:
                f[a] += i
            if b >= 0:
                f[b] -= i
            stamp_g(a, b, geq)

        for fet, ev in self.fets:
            d = self.node_index[fet.drain]
            g = self.node_index[fet.gate]
            s = self.node_index[fet.source]
            vgs = self.v_of(x, fet.gate) - self.v_of(x, fet.source)
            vds = self.v_of(x, fet.drain) - self.v_of(x, fet.source)
            i, gm, gds = ev.current_and_derivs(vgs, vds)
            if d >= 0:
                f[d] += i
                if g >= 0:
                    jac[d, g] += gm
                if d >= 0:
                    jac[d, d] += gds
                if s >= 0:
                    jac[d, s] -= gm + gds
            if s >= 0:
                f[s] -= i
                if g >= 0:
                    jac[s, g] -= gm
                if d >= 0:
                    jac[s, d] -= gds
                jac[s, s] += gm + gds
            # transient gate capacitance handled via cap_companion entries
            if cap_companion is not None and fet.name in cap_companion:
                geq, ieq = cap_companion[fet.name]
                vg = self.v_of(x, fet.gate)
                ig = geq * vg - ieq
                if g >= 0:
                    f[g] += ig
                    jac[g, g] += geq

        for k, src in enumerate(self.vsources):
            row = self.nn + k
            a, b = self.node_index[src.npos], self.node_index[src.nneg]
            ibr = x[row]
            if a >= 0:
                f[a] += ibr
                jac[a, row] += 1.0
            if b >= 0:
                f[b] -= ibr
                jac[b, row] -= 1.0
            f[row] = ((x[a] if a >= 0 else 0.0) - (x[b] if b >= 0 else 0.0)
                      - src_scale * src.value(t))
            if a >= 0:
                jac[row, a] += 1.0
            if b >= 0:
                jac[row, b] -= 1.0

        if gmin > 0.0:
            for i in range(self.nn):
                f[i] += gmin * x[i]
                jac[i, i] += gmin
        return f, jac

    def newton(self, x0, t, cfg: SolverConfig, src_scale=1.0, gmin=0.0,
               cap_companion=None) -> np.ndarray:
        x = x0.copy()
        f, jac = self.assemble(x, t, src_scale, gmin, cap_companion)
        fnorm = np.max(np.abs(f))
        for _ in range(cfg.max_iterations):
            if fnorm <= cfg.abs_tolerance:
                return x
            try:
                step = np.linalg.solve(jac, f)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceError(f"singular MNA jacobian: {exc}") from exc
            damping = 1.0
            while True:
                x_new = x - damping * step
                f_new, jac_new = self.assemble(x_new, t, src_scale, gmin,
                                               cap_companion)
                fnorm_new = np.max(np.abs(f_new))
                if fnorm_new < fnorm or damping <= cfg.damping_floor:
                    break
                damping *= 0.5
            x, f, jac, fnorm = x_new, f_new, jac_new, fnorm_new
        if fnorm <= cfg.abs_tolerance:
            return x
        worst = int(np.argmax(np.abs(f)))
        where = (self.node_names[worst] if worst < self.nn
                 else f"source {self.vsources[worst - self.nn].name}")
        raise ConvergenceError(
            f"Newton failed (|f|={fnorm:.3e} at {where})", best=x)


# --------------------------------------------------------------------------
# analyses

def dc_operating_point(netlist: Netlist, cfg: SolverConfig = SolverConfig(),
                       x0=None, _t: float = 0.0) -> dict:
    """Node-voltage map of the DC operating point (capacitors open).

    Tries plain Newton first, then a gmin ramp, then source stepping.
    """
    mna = _Mna(netlist)
    x = np.zeros(mna.size) if x0 is None else np.asarray(x0, dtype=float).copy()
    try:
        x = mna.newton(x, _t, cfg)
    except ConvergenceError:
        x = _dc_fallback(mna, cfg, _t)
    result = {name: x[i] for name, i in
              ((n, mna.node_index[n]) for n in mna.node_names)}
    result[netlist.ground] = 0.0
    for k, src in enumerate(mna.vsources):
        result[f"i({src.name})"] = x[mna.nn + k]
    return result


def _dc_fallback(mna: _Mna, cfg: SolverConfig, t: float) -> np.ndarray:
    x = np.zeros(mna.size)
    try:
        for expo in range(3, 13):
            x = mna.newton(x, t, cfg, gmin=10.0 ** (-expo))
        return mna.newton(x, t, cfg)
    except ConvergenceError:
        pass
    x = np.zeros(mna.size)
    last_exc = None
    for scale in np.linspace(0.1, 1.0, 10):
        try:
            x = mna.newton(x, t, cfg, src_scale=scale)
        except ConvergenceError as exc:
            last_exc = exc
            x = exc.best if exc.best is not None else x
    try:
        return mna.newton(x, t, cfg)
    except ConvergenceError as exc:
        raise SimulationError(f"DC operating point did not converge: {exc}") from exc


def dc_sweep(netlist: Netlist, source: str, values,
             cfg: SolverConfig = SolverConfig()) -> dict:
    """One operating point per swept source value, warm-started.

    Returns {label: Waveform} with the swept voltage as abscissa; labels are
    `v(node)` and `i(source)`.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise NetlistError("empty sweep range")
    src = next((e for e in netlist.sources() if e.name == source), None)
    if src is None:
        raise NetlistError(f"no source named '{source}'")
    if not isinstance(src, VSourceDC):
        raise NetlistError(f"dc_sweep requires a DC source, got {type(src).__name__}")

    base_elements = [e for e in netlist.elements if e is not src]
    x0 = None
    rows: dict[str, list] = {}
    for j, val in enumerate(values):
        swept = Netlist(base_elements + [VSourceDC(src.name, src.npos, src.nneg, float(val))],
                        ground=netlist.ground)
        mna = _Mna(swept)
        xv = np.zeros(mna.size) if x0 is None else x0
        try:
            op = dc_operating_point(swept, cfg, x0=xv)
        except SimulationError as exc:
            raise SimulationError(f"sweep point {j} ({source}={val}): {exc}") from exc
        for key, v in op.items():
            rows.setdefault(key, []).append(v)
        x0 = np.array([op[n] for n in mna.node_names]
                      + [op[f"i({s.name})"] for s in mna.vsources])
    abscissa = values
    order = None
    if values.size > 1 and np.all(np.diff(values) < 0):
        order = slice(None, None, -1)          # descending sweep: reverse
        abscissa = values[order]
    elif values.size > 1 and np.any(np.diff(values) <= 0):
        abscissa = np.arange(values.size, dtype=float)  # non-monotonic: index
    out = {}
    for key, vals in rows.items():
        label = key if key.startswith("i(") else f"v({key})"
        arr = np.asarray(vals)
        out[label] = Waveform(abscissa, arr[order] if order else arr, label)
    return out


@dataclass(frozen=True)
class TransientConfig:
    t_stop: float
    dt_initial: float = 0.1e-12
    dt_max: float = 0.1e-12
    method: str = "trapezoidal"  # or "backward_euler"
    solver: SolverConfig = SolverConfig(max_iterations=50, abs_tolerance=1e-12)

    def __post_init__(self):
        if not (0 < self.dt_initial <= self.dt_max < self.t_stop):
            raise ValueError("need 0 < dt_initial <= dt_max < t_stop")
        if self.method not in ("trapezoidal", "backward_euler"):
            raise ValueError(f"unknown method {self.method!r}")


def transient(netlist: Netlist, cfg: TransientConfig) -> dict:
    """Implicit transient analysis.

    Returns {label: Waveform} for every node voltage (`v(node)`), every
    source branch current (`i(src)`), and every capacitor current
    (`i(cap)`, positive n1 -> n2).  Fixed step when dt_initial == dt_max;
    otherwise the step adapts on a local-truncation-error estimate.
    Trapezoidal integration starts with one backward-Euler step.
    """
    mna = _Mna(netlist)
    op = dc_operating_point(netlist, cfg.solver, _t=0.0)
    x = np.array([op[n] for n in mna.node_names]
                 + [op[f"i({s.name})"] for s in mna.vsources])

    def cap_states(xv):
        """(voltage, current) per storage element at a solved state."""
        states = {}
        for c in mna.capacitors:
            dv = mna.v_of(xv, c.n1) - mna.v_of(xv, c.n2)
            states[c.name] = dv
        for fet, ev in mna.fets:
            states[fet.name] = mna.v_of(xv, fet.gate)
        return states

    breakpoints = sorted({bp for s in mna.vsources
                          if isinstance(s, VSourcePulse)
                          for bp in s.breakpoints(cfg.t_stop)})
    breakpoints.append(cfg.t_stop)
    breakpoints.append(math.inf)
    bp_idx = 0

    adaptive = cfg.dt_max > cfg.dt_initial
    lte_tol = 1e-4  # V, per-step truncation target for adaptive control

    t = 0.0
    dt = cfg.dt_initial
    v_prev = cap_states(x)
    i_prev = {name: 0.0 for name in v_prev}
    times = [0.0]
    history = [x.copy()]
    x_older, t_older = None, None
    first_step = True

    def cap_value(name):
        for c in mna.capacitors:
            if c.name == name:
                return c.farads
        for fet, ev in mna.fets:
            if fet.name == name:
                return ev.gate_cap
        raise KeyError(name)

    min_dt = cfg.dt_initial * 1e-6
    cap_currents: dict[str, list] = {name: [0.0] for name in v_prev}

    # Breakpoints (and t_stop) closer than this are snapped rather than hit
    # with a microscopic step, where the companion terms 2C/dt would swamp
    # the residual with rounding noise.
    t_snap = 1e-9 * cfg.dt_initial

    while t < cfg.t_stop - t_snap:
        while breakpoints[bp_idx] <= t + t_snap:
            bp_idx += 1
        dt_step = min(dt, cfg.t_stop - t, breakpoints[bp_idx] - t)
        t_new = t + dt_step

        use_be = first_step or cfg.method == "backward_euler"
        companion = {}
        for name, v0 in v_prev.items():
            c = cap_value(name)
            if use_be:
                geq = c / dt_step
                ieq = geq * v0
            else:
                geq = 2.0 * c / dt_step
                ieq = geq * v0 + i_prev[name]
            companion[name] = (geq, ieq)

        try:
            x_new = mna.newton(x.copy(), t_new, cfg.solver,
                               cap_companion=companion)
        except ConvergenceError:
            dt = dt_step / 2.0
            if dt < min_dt:
                raise SimulationError(
                    f"transient step-size underflow at t={t:.3e}s")
            continue

        if adaptive and x_older is not None:
            # LTE proxy: deviation from linear extrapolation of the last
            # two accepted points, voltage unknowns only.
            slope = (x - x_older)[: mna.nn] / (t - t_older)
            pred = x[: mna.nn] + slope * dt_step
            err = float(np.max(np.abs(x_new[: mna.nn] - pred))) if mna.nn else 0.0
            if err > 4.0 * lte_tol and dt_step > min_dt:
                dt = dt_step / 2.0
                continue
            if err < 0.25 * lte_tol:
                dt = min(dt_step * 2.0, cfg.dt_max)
            else:
                dt = min(dt_step, cfg.dt_max)
        else:
            dt = cfg.dt_max if not adaptive else min(dt, cfg.dt_max)

        v_new = cap_states(x_new)
        for name, v1 in v_new.items():
            geq, ieq = companion[name]
            i_new = geq * v1 - ieq
            i_prev[name] = i_new
            cap_currents[name].append(i_new)
        v_prev = v_new
        x_older, t_older = x, t
        x, t = x_new, t_new
        times.append(t)
        history.append(x.copy())
        first_step = False

    times_arr = np.asarray(times)
    hist = np.asarray(history)
    out: dict[str, Waveform] = {}
    for name in mna.node_names:
        label = f"v({name})"
        out[label] = Waveform(times_arr, hist[:, mna.node_index[name]], label)
    for k, src in enumerate(mna.vsources):
        label = f"i({src.name})"
        out[label] = Waveform(times_arr, hist[:, mna.nn + k], label)
    for name, series in cap_currents.items():
        label = f"i({name})"
        out[label] = Waveform(times_arr, np.asarray(series), label)
    return out
