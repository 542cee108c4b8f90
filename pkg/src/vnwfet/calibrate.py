"""I-V data ingestion and model-card parameter extraction.

Fits a chosen subset of card parameters to measured (vgs, vds, id) points
with bounded trust-region least squares.  The residual can weight the
current logarithmically (subthreshold emphasis), linearly (on-current
emphasis), or mixed (log below an automatic threshold split, linear above).
Multi-start restarts make the fit robust to the exponential subthreshold
region; a fixed seed makes it deterministic.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .compact_model import BiasPoint, ModelCard, terminal_current

LOG_CURRENT = "log_current"
LINEAR = "linear"
MIXED = "mixed"
WEIGHTINGS = (LOG_CURRENT, LINEAR, MIXED)

IV_HEADER = ("vgs_v", "vds_v", "id_a")


class IvDataError(ValueError):
    """Malformed I-V data file or dataset."""


class FitSpecError(ValueError):
    pass


@dataclass(frozen=True)
class IvDataset:
    vgs: np.ndarray
    vds: np.ndarray
    id: np.ndarray
    diameter: float = float("nan")     # m, geometry tag
    nf: int = 0                        # geometry tag
    temperature: float = 300.0

    def __post_init__(self):
        for name in ("vgs", "vds", "id"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=float))
        n = self.vgs.size
        if n == 0:
            raise IvDataError("empty dataset")
        if self.vds.size != n or self.id.size != n:
            raise IvDataError("vgs, vds, id must have equal length")
        for name in ("vgs", "vds", "id"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise IvDataError(f"non-finite value in column {name}")

    def __len__(self):
        return self.vgs.size


def load_iv_csv(path) -> IvDataset:
    """Dataset from a CSV file with header ``vgs_v,vds_v,id_a``."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IvDataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(IV_HEADER):
            raise IvDataError(
                f"{path}:1: expected header {','.join(IV_HEADER)}, "
                f"got {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise IvDataError(f"{path}:{lineno}: expected 3 fields, "
                                  f"got {len(row)}")
            try:
                rows.append(tuple(float(c) for c in row))
            except ValueError:
                raise IvDataError(
                    f"{path}:{lineno}: non-numeric value in {row!r}") from None
    if not rows:
        raise IvDataError(f"{path}: no data rows")
    vgs, vds, idr = (np.array(col) for col in zip(*rows))
    return IvDataset(vgs=vgs, vds=vds, id=idr)


def save_iv_csv(dataset: IvDataset, path) -> None:
    """Write a dataset back out; floats use repr so a reload is bit-exact."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(IV_HEADER)
        for g, d, i in zip(dataset.vgs, dataset.vds, dataset.id):
            writer.writerow([repr(float(g)), repr(float(d)), repr(float(i))])


# parameter name -> (card field, default bounds)
FIT_PARAMETERS: Dict[str, Tuple[str, Tuple[float, float]]] = {
    "eta": ("interface_trap_eta", (1.0, 2.0)),
    "mu0": ("low_field_mobility_mu0", (1e-5, 1e-1)),
    "vfb": ("flatband_VFB", (-1.0, 5.0)),
    "rs": ("series_RS", (0.0, 1e5)),
    "rd": ("series_RD", (0.0, 1e5)),
    "eta1": ("resistance_bias_eta1", (0.0, 1.0)),
    "dibl": ("dibl_coefficient", (0.0, 0.5)),
    "gidl_a": ("gidl_A", (0.0, 1e3)),
    "gidl_c": ("gidl_C", (0.0, 2.0)),
}


@dataclass(frozen=True)
class FitSpec:
    free: Sequence[str]
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    weighting: str = MIXED
    n_starts: int = 8
    seed: int = 0

    def __post_init__(self):
        if not self.free:
            raise FitSpecError("free parameter set is empty")
        for name in self.free:
            if name not in FIT_PARAMETERS:
                raise FitSpecError(
                    f"unknown parameter {name!r}; choose from "
                    f"{sorted(FIT_PARAMETERS)}")
        for name, (lo, hi) in self.bounds.items():
            if name not in FIT_PARAMETERS:
                raise FitSpecError(f"bounds given for unknown parameter {name!r}")
            if not lo < hi:
                raise FitSpecError(f"bounds for {name!r} not ordered: {lo}, {hi}")
        if self.weighting not in WEIGHTINGS:
            raise FitSpecError(f"weighting must be one of {WEIGHTINGS}")
        if self.n_starts < 1:
            raise FitSpecError("n_starts must be >= 1")

    def bound(self, name: str) -> Tuple[float, float]:
        return self.bounds.get(name, FIT_PARAMETERS[name][1])


@dataclass(frozen=True)
class FitResult:
    card: ModelCard
    residuals: np.ndarray
    rms_decades: float
    cost: float
    converged: bool
    pinned: Tuple[str, ...] = ()
    start_costs: Tuple[float, ...] = ()


def _card_with(card: ModelCard, names, values) -> ModelCard:
    updates = {FIT_PARAMETERS[n][0]: float(v) for n, v in zip(names, values)}
    return dataclasses.replace(card, **updates)


def _model_currents(card: ModelCard, data: IvDataset) -> np.ndarray:
    return np.array([terminal_current(card, BiasPoint(vgs=g, vds=d))
                     for g, d in zip(data.vgs, data.vds)])


_I_FLOOR = 1e-18  # A, guards log weighting against exact zeros


def _make_residual(card0: ModelCard, data: IvDataset, spec: FitSpec):
    names = list(spec.free)
    i_meas = np.abs(data.id)
    if spec.weighting in (LOG_CURRENT, MIXED) and np.any(i_meas <= 0):
        raise IvDataError("log-weighted fitting requires |id| > 0 on all rows")
    log_meas = np.log10(np.maximum(i_meas, _I_FLOOR))
    i_scale = i_meas.max()
    if spec.weighting == MIXED:
        # split at the geometric midpoint of the measured current range:
        # below it the device is sub/near-threshold and log weighting keeps
        # the slope honest; above it linear weighting protects the on-current.
        split = math.sqrt(i_meas.max() * max(i_meas.min(), _I_FLOOR))
        log_rows = i_meas < split
    elif spec.weighting == LOG_CURRENT:
        log_rows = np.ones(len(data), dtype=bool)
    else:
        log_rows = np.zeros(len(data), dtype=bool)

    def residual(values):
        card = _card_with(card0, names, values)
        i_model = np.abs(_model_currents(card, data))
        r = np.empty(len(data))
        r[log_rows] = (np.log10(np.maximum(i_model[log_rows], _I_FLOOR))
                       - log_meas[log_rows])
        r[~log_rows] = (i_model[~log_rows] - i_meas[~log_rows]) / i_scale
        return r

    return residual, log_meas


def fit(card0: ModelCard, data: IvDataset, spec: FitSpec) -> FitResult:
    """Best-fit card for the free parameters of `spec`.

    Runs `spec.n_starts` bounded trust-region least-squares solves from
    seeded random starting points (the first start is card0 itself) and
    keeps the lowest-cost solution; ties break on start order, so results
    are deterministic for a given seed.
    """
    names = list(spec.free)
    lo = np.array([spec.bound(n)[0] for n in names])
    hi = np.array([spec.bound(n)[1] for n in names])
    x0 = np.array([getattr(card0, FIT_PARAMETERS[n][0]) for n in names])
    x0 = np.clip(x0, lo, hi)
    residual, log_meas = _make_residual(card0, data, spec)

    rng = np.random.default_rng(spec.seed)
    starts = [x0]
    for _ in range(spec.n_starts - 1):
        starts.append(lo + rng.random(len(names)) * (hi - lo))

    def solve(start):
        try:
            return least_squares(residual, start, bounds=(lo, hi),
                                 method="trf", xtol=1e-12, ftol=1e-12,
                                 gtol=1e-12)
        except (ValueError, FloatingPointError):
            return None

    with ThreadPoolExecutor(max_workers=min(8, len(starts))) as pool:
        solutions = list(pool.map(solve, starts))

    scored = [(s.cost, k, s) for k, s in enumerate(solutions) if s is not None]
    if not scored:
        raise FitSpecError("all fit starts failed to evaluate")
    scored.sort(key=lambda item: (item[0], item[1]))
    _, _, best = scored[0]
    converged = bool(best.status > 0)
    if not converged:
        warnings.warn("fit did not converge; returning best point found")

    pinned = tuple(n for n, v, a, b in zip(names, best.x, lo, hi)
                   if math.isclose(v, a, abs_tol=1e-12)
                   or math.isclose(v, b, rel_tol=1e-12))
    for n in pinned:
        warnings.warn(f"fitted parameter {n!r} pinned at its bound")

    card = _card_with(card0, names, best.x)
    i_model = np.abs(_model_currents(card, data))
    decades = np.log10(np.maximum(i_model, _I_FLOOR)) - log_meas
    rms_decades = float(np.sqrt(np.mean(decades ** 2)))
    return FitResult(card=card, residuals=best.fun,
                     rms_decades=rms_decades, cost=float(best.cost),
                     converged=converged, pinned=pinned,
                     start_costs=tuple(float(s.cost) for s in solutions
                                       if s is not None))


def synthesize_iv(card: ModelCard, vgs_values, vds_values,
                  noise: float = 0.0, seed: Optional[int] = None) -> IvDataset:
    """Model-generated dataset over a (vgs x vds) grid.

    `noise` applies multiplicative lognormal-ish perturbation
    (1 + noise*N(0,1)) per point — a stand-in for measurement scatter.
    """
    vgs_values = np.asarray(vgs_values, dtype=float)
    vds_values = np.asarray(vds_values, dtype=float)
    gg, dd = np.meshgrid(vgs_values, vds_values, indexing="ij")
    gg, dd = gg.ravel(), dd.ravel()
    currents = np.array([terminal_current(card, BiasPoint(vgs=g, vds=d))
                         for g, d in zip(gg, dd)])
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        currents = currents * (1.0 + noise * rng.standard_normal(len(currents)))
    return IvDataset(vgs=gg, vds=dd, id=currents,
                     diameter=2.0 * card.geometry.radius_R,
                     nf=card.nf, temperature=card.temperature)
