"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field


class IvRequest(BaseModel):
    card: Optional[dict] = None          # model-card document; default card if omitted
    vgs: List[float] = Field(min_length=1)
    vds: List[float] = Field(min_length=1)


class IvResponse(BaseModel):
    vgs_v: List[float]
    vds_v: List[float]
    id_a: List[float]


class TransientOptions(BaseModel):
    n_periods: float = 2.0
    dt_s: float = 0.1e-12
    method: str = "trapezoidal"


class CellOptions(BaseModel):
    vdd: float = 1.0
    freq: float = 1e9
    fanout: float = 1.0
    nf_ratio: int = 3
    rise_s: float = 10e-12
    fall_s: float = 10e-12
    load_resistance_ohm: Optional[float] = None
    load_cap_f: Optional[float] = None
    active_bias_v: Optional[float] = None
    nf_load: Optional[int] = None
    tune_defaults: bool = True           # auto-tune passive/active load values


class SimulateRequest(BaseModel):
    # either a topology-built cell ...
    topology: Optional[str] = None
    nf: int = 1
    card: Optional[dict] = None
    cell: CellOptions = CellOptions()
    # ... or an explicit netlist document
    netlist: Optional[dict] = None
    transient: TransientOptions = TransientOptions()


class SimulateResponse(BaseModel):
    time_s: List[float]
    columns: Dict[str, List[float]]


class MetricsRequest(BaseModel):
    card: Optional[dict] = None
    nf_list: List[int] = Field(default=[10, 30, 100, 300], min_length=1)
    fanout_list: List[float] = Field(default=[1.0], min_length=1)
    vdd: float = 1.0
    freq: float = 1e9
    topology: str = "complementary"
    dynamic: bool = True                 # transient metrics are slow; optional
    cell: CellOptions = CellOptions()


class StaticMetrics(BaseModel):
    i_on_a: float
    i_off_a: float
    on_off_ratio: float
    leakage_slope_a_per_nw: float
    leakage_density_a_per_m2: float
    ratio_by_nf: Dict[int, float]


class DynamicMetrics(BaseModel):
    nf: int
    t_plh_s: float
    t_phl_s: float
    level_degradation_high: float
    overshoot_low: float
    energy_per_transition_j: float
    energy_per_nanowire_j: float


class FanoutCellOut(BaseModel):
    nf: int
    fanout: float
    feasible: bool
    charge_time_s: float
    error: str = ""


class MetricsResponse(BaseModel):
    static: StaticMetrics
    dynamic: List[DynamicMetrics]
    fanout_matrix: List[FanoutCellOut]


class FitSpecIn(BaseModel):
    free: List[str] = Field(min_length=1)
    bounds: Dict[str, Tuple[float, float]] = {}
    weighting: str = "mixed"
    n_starts: int = 8
    seed: int = 0


class FitRequest(BaseModel):
    card0: Optional[dict] = None
    vgs_v: List[float] = Field(min_length=1)
    vds_v: List[float] = Field(min_length=1)
    id_a: List[float] = Field(min_length=1)
    fitspec: FitSpecIn


class FitResponse(BaseModel):
    card: dict
    rms_decades: float
    cost: float
    converged: bool
    pinned: List[str]
    residuals: List[float]


class FootprintRequest(BaseModel):
    vnwfet_lambda_nm: Optional[float] = None
    vnwfet_ruleset: Optional[dict] = None
    finfet_ruleset: Optional[dict] = None


class HealthResponse(BaseModel):
    status: str
    version: str
