"""FastAPI application wrapping the modeling toolkit.

Input problems map to HTTP 400, numerical failures (non-convergence,
step-size underflow) to HTTP 422; both carry {"detail": message}.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..calibrate import FitSpec, IvDataError, IvDataset, fit
from ..cards import CardFormatError, card_from_dict, card_to_dict, default_card
from ..cells import (TOPOLOGIES, COMPLEMENTARY, InverterOptions, TopologyError,
                     default_active_options, default_passive_options)
from ..characterize import (WaveformError, dynamic_report, fanout_analysis,
                            ion_ioff, leakage_slope, simulate_inverter)
from ..circuit import (NetlistError, SimulationError, TransientConfig,
                       transient)
from ..compact_model import BiasPoint, InvalidCardError, terminal_current
from ..footprint import (LambdaRuleSet, RulesetError, builtin_rulesets,
                         comparison_report, vnwfet_ruleset)
from ..netlist_io import netlist_from_dict
from ..numerics import ConvergenceError, DomainError
from . import schemas as S

_INPUT_ERRORS = (CardFormatError, InvalidCardError, NetlistError,
                 TopologyError, IvDataError, RulesetError, DomainError,
                 ValueError, KeyError)
_NUMERICAL_ERRORS = (SimulationError, ConvergenceError, WaveformError)


def _card_or_default(doc):
    return card_from_dict(doc) if doc is not None else default_card()


def _cell_options(topology, nf, card, cell: S.CellOptions) -> InverterOptions:
    common = dict(vdd=cell.vdd, freq=cell.freq, fanout=cell.fanout,
                  nf_ratio=cell.nf_ratio, rise=cell.rise_s, fall=cell.fall_s)
    explicit = dict(load_resistance=cell.load_resistance_ohm,
                    load_cap=cell.load_cap_f, active_bias=cell.active_bias_v,
                    nf_load=cell.nf_load)
    if cell.tune_defaults and topology == "passive_load" \
            and cell.load_resistance_ohm is None:
        opts = default_passive_options(card, nf, cell.vdd, cell.freq,
                                       fanout=cell.fanout,
                                       nf_ratio=cell.nf_ratio,
                                       rise=cell.rise_s, fall=cell.fall_s)
        if cell.load_cap_f is not None:
            opts = InverterOptions(**{**common, **explicit,
                                      "load_resistance": opts.load_resistance})
        return opts
    if cell.tune_defaults and topology == "active_load" \
            and cell.active_bias_v is None:
        return default_active_options(card, nf, cell.vdd, cell.freq,
                                      fanout=cell.fanout,
                                      nf_ratio=cell.nf_ratio,
                                      rise=cell.rise_s, fall=cell.fall_s)
    return InverterOptions(**common, **explicit)


def create_app() -> FastAPI:
    app = FastAPI(title="vnwfet", version=__version__)

    @app.exception_handler(Exception)
    async def _unhandled(request, exc):  # pragma: no cover - safety net
        raise exc

    def guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _NUMERICAL_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except _INPUT_ERRORS as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/health", response_model=S.HealthResponse)
    def health():
        return S.HealthResponse(status="ok", version=__version__)

    @app.post("/iv", response_model=S.IvResponse)
    def iv(req: S.IvRequest):
        card = guard(_card_or_default, req.card)
        gg, dd = np.meshgrid(req.vgs, req.vds, indexing="ij")
        gg, dd = gg.ravel(), dd.ravel()
        ids = [guard(terminal_current, card, BiasPoint(vgs=g, vds=d))
               for g, d in zip(gg, dd)]
        return S.IvResponse(vgs_v=gg.tolist(), vds_v=dd.tolist(), id_a=ids)

    @app.post("/simulate", response_model=S.SimulateResponse)
    def simulate(req: S.SimulateRequest):
        if (req.topology is None) == (req.netlist is None):
            raise HTTPException(
                status_code=400,
                detail="provide exactly one of 'topology' or 'netlist'")
        if req.netlist is not None:
            nl = guard(netlist_from_dict, req.netlist)
            if req.transient.n_periods <= 0:
                raise HTTPException(status_code=400,
                                    detail="n_periods must be > 0")
            periods = [s.period for s in nl.sources()
                       if hasattr(s, "period")]
            base = max(periods) if periods else 1e-9
            cfg = TransientConfig(t_stop=req.transient.n_periods * base,
                                  dt_initial=req.transient.dt_s,
                                  dt_max=req.transient.dt_s,
                                  method=req.transient.method)
            wfs = guard(transient, nl, cfg)
        else:
            if req.topology not in TOPOLOGIES:
                raise HTTPException(status_code=400,
                                    detail=f"unknown topology {req.topology!r};"
                                           f" choose from {TOPOLOGIES}")
            card = guard(_card_or_default, req.card)
            opts = guard(_cell_options, req.topology, req.nf, card, req.cell)
            wfs = guard(simulate_inverter, card, req.topology, req.nf, opts,
                        n_periods=req.transient.n_periods,
                        dt=req.transient.dt_s)
        labels = sorted(wfs)
        times = wfs[labels[0]].times
        return S.SimulateResponse(
            time_s=times.tolist(),
            columns={lb: wfs[lb].values.tolist() for lb in labels})

    @app.post("/metrics", response_model=S.MetricsResponse)
    def metrics(req: S.MetricsRequest):
        card = guard(_card_or_default, req.card)
        rep = guard(leakage_slope, card, req.nf_list, req.vdd) \
            if len(set(req.nf_list)) > 1 \
            else guard(ion_ioff, card.with_nf(req.nf_list[0]), req.vdd)
        ratios = {nf: guard(ion_ioff, card.with_nf(nf), req.vdd).ratio
                  for nf in req.nf_list}
        static = S.StaticMetrics(
            i_on_a=rep.i_on, i_off_a=rep.i_off, on_off_ratio=rep.ratio,
            leakage_slope_a_per_nw=rep.leakage_slope,
            leakage_density_a_per_m2=rep.leakage_density,
            ratio_by_nf=ratios)
        dynamic = []
        if req.dynamic:
            for nf in req.nf_list:
                opts = guard(_cell_options, req.topology, nf, card, req.cell)
                dr = guard(dynamic_report, card, req.topology, nf, opts,
                           n_periods=1.0)
                dynamic.append(S.DynamicMetrics(
                    nf=nf, t_plh_s=dr.t_plh, t_phl_s=dr.t_phl,
                    level_degradation_high=dr.level_degradation_high,
                    overshoot_low=dr.overshoot_low,
                    energy_per_transition_j=dr.energy_per_transition,
                    energy_per_nanowire_j=dr.energy_per_nanowire))
        matrix = []
        if req.dynamic and req.topology == COMPLEMENTARY:
            cells = guard(fanout_analysis, card, req.nf_list, req.fanout_list,
                          freq=req.freq)
            matrix = [S.FanoutCellOut(nf=c.nf, fanout=c.fanout,
                                      feasible=c.feasible,
                                      charge_time_s=c.charge_time,
                                      error=c.error) for c in cells]
        return S.MetricsResponse(static=static, dynamic=dynamic,
                                 fanout_matrix=matrix)

    @app.post("/fit", response_model=S.FitResponse)
    def fit_endpoint(req: S.FitRequest):
        card0 = guard(_card_or_default, req.card0)
        data = guard(IvDataset, vgs=req.vgs_v, vds=req.vds_v, id=req.id_a)
        spec = guard(FitSpec, free=tuple(req.fitspec.free),
                     bounds=dict(req.fitspec.bounds),
                     weighting=req.fitspec.weighting,
                     n_starts=req.fitspec.n_starts, seed=req.fitspec.seed)
        result = guard(fit, card0, data, spec)
        return S.FitResponse(card=card_to_dict(result.card),
                             rms_decades=result.rms_decades,
                             cost=result.cost, converged=result.converged,
                             pinned=list(result.pinned),
                             residuals=result.residuals.tolist())

    @app.post("/footprint")
    def footprint(req: S.FootprintRequest):
        fin, nw = None, None
        if req.finfet_ruleset is not None:
            fin = guard(lambda d: LambdaRuleSet(**d), req.finfet_ruleset)
        if req.vnwfet_ruleset is not None:
            nw = guard(lambda d: LambdaRuleSet(**d), req.vnwfet_ruleset)
        elif req.vnwfet_lambda_nm is not None:
            nw = guard(vnwfet_ruleset, req.vnwfet_lambda_nm)
        return guard(comparison_report, fin, nw)

    return app
