"""Analytic delay-spread metrics of a floorplan.

The expected indoor RMS-DS mixes, per room, a LOS branch weighted by the
room's own containment kernel and an NLOS branch weighted by the remainder
of the building kernel; each branch contributes the mean of a zero-clamped
Gaussian. The open-space expectation averages the two-ray delay spread over
the same distance density. Their difference is the DS gain.

All integrands have compact support ``[0, diagonal]`` and kinks at the
kernel branch points, so integration is adaptive with mandatory splits there.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .channel import LOS, NLOS, DsParams, default_params, tau_indoor_distribution, tau_open_space, truncated_mean
from .exceptions import ConvergenceError, ParamError
from .geometry import z_breakpoints, z_kernel
from .layout import Floorplan, iter_room_groups

__all__ = [
    "QuadratureSpec",
    "EvalReport",
    "CSV_COLUMNS",
    "integrate_adaptive",
    "expected_tau_indoor",
    "expected_tau_open",
    "reliability",
    "ds_gain",
    "conditional_tau_mean",
    "tau_mixture_cdf",
    "los_fraction",
]

RELIABILITY_MODES = ("variance", "strict")


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))


@dataclass
class _Integral:
    value: float
    error: float
    evaluations: int


def integrate_adaptive(f, upper: float, points, q: QuadratureSpec) -> _Integral:
    """Integrate scalar ``f`` over ``[0, upper]`` with forced splits at ``points``.

    Raises ConvergenceError when the final error estimate exceeds
    ``max(abs_tol, rel_tol * |value|)``.
    """
    pts = sorted({float(p) for p in (*points, *q.breakpoints) if 0.0 < p < upper})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(
            f,
            0.0,
            upper,
            points=pts or None,
            epsabs=q.abs_tol,
            epsrel=q.rel_tol,
            limit=max(q.max_subdivisions, len(pts) + 2),
            full_output=1,
        )
    value, err, info = res[0], res[1], res[2]
    tol = max(q.abs_tol, q.rel_tol * abs(value))
    if not math.isfinite(value) or err > tol:
        msg = res[3] if len(res) > 3 else ""
        raise ConvergenceError(
            f"quadrature error estimate {err:.3g} exceeds tolerance {tol:.3g} "
            f"after {q.max_subdivisions} subdivisions {msg}".rstrip()
        )
    return _Integral(value, err, int(info["neval"]))


@dataclass(frozen=True)
class EvalReport:
    floorplan_id: str | None
    e_tau_indoor: float
    e_tau_open: float
    ds_gain: float
    reliability_sigma: float
    contributions: tuple[tuple[str, float], ...] = ()
    evaluations: int = 0
    error_estimate: float = 0.0
    reliability_mode: str = "variance"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["contributions"] = [{"room": rid, "contribution_ns": v} for rid, v in self.contributions]
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def csv_row(self) -> list:
        return [
            self.floorplan_id or "",
            repr(self.e_tau_indoor),
            repr(self.e_tau_open),
            repr(self.ds_gain),
            repr(self.reliability_sigma),
            repr(self.error_estimate),
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


CSV_COLUMNS = ("floorplan_id", "e_tau_indoor_ns", "e_tau_open_ns", "ds_gain_ns", "reliability_ns", "quad_error_est")


def _check_params(fp: Floorplan, p: DsParams) -> None:
    missing = sorted(t for t in fp.room_types if not p.has_type(t))
    if missing:
        raise ParamError(f"room types {missing} have no LOS/NLOS rows in the parameter table")


def _room_integrand(fp: Floorplan, p: DsParams, room_type: str, l: float, m: float):
    X, Y = fp.x, fp.y
    scale = 2.0 * math.pi / (X * Y)

    def f(d: float) -> float:
        if d <= 0.0:
            return 0.0
        zb = z_kernel(d, Y, X)
        zi = z_kernel(d, l, m)
        t_los = truncated_mean(tau_indoor_distribution(d, room_type, LOS, p))
        t_nlos = truncated_mean(tau_indoor_distribution(d, room_type, NLOS, p))
        return scale * d * (zi * t_los + (zb - zi) * t_nlos)

    return f


def _group_points(fp: Floorplan, l: float, m: float):
    return (*z_breakpoints(l, m), *z_breakpoints(fp.y, fp.x))


def _indoor_groups(fp, p, q, threads):
    groups = list(iter_room_groups(fp))

    def run(item):
        (room_type, l, m), _ = item
        f = _room_integrand(fp, p, room_type, l, m)
        return integrate_adaptive(f, fp.diagonal, _group_points(fp, l, m), q)

    if threads and threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, groups))
    else:
        results = [run(g) for g in groups]
    return groups, results


def expected_tau_indoor(
    fp: Floorplan,
    p: DsParams | None = None,
    q: QuadratureSpec | None = None,
    threads: int | None = None,
) -> tuple[float, list[tuple[str, float]], _Integral]:
    """Expected indoor RMS-DS (ns), per-room contributions and diagnostics.

    Rooms sharing (type, short edge, long edge) share one integral; the
    result is summed in room declaration order for any worker count.
    """
    p = default_params() if p is None else p
    q = QuadratureSpec() if q is None else q
    _check_params(fp, p)
    groups, results = _indoor_groups(fp, p, q, threads)
    per_room = [0.0] * fp.n_rooms
    err = 0.0
    neval = 0
    V = fp.area
    for (_, members), res in zip(groups, results):
        for k in members:
            per_room[k] = fp.rooms[k].area / V * res.value
            err += fp.rooms[k].area / V * res.error
        neval += res.evaluations
    contributions = [(r.id, c) for r, c in zip(fp.rooms, per_room)]
    total = 0.0
    for c in per_room:
        total += c
    return total, contributions, _Integral(total, err, neval)


def expected_tau_open(fp: Floorplan, q: QuadratureSpec | None = None, c: float | None = None) -> tuple[float, _Integral]:
    """Expected two-ray RMS-DS (ns) over the building's distance density."""
    q = QuadratureSpec() if q is None else q
    c = default_params().c if c is None else c
    X, Y = fp.x, fp.y
    scale = 2.0 * math.pi / (X * Y)
    hT, hR = fp.tx_height, fp.rx_height

    def f(d: float) -> float:
        return scale * d * z_kernel(d, Y, X) * tau_open_space(d, hT, hR, c)

    res = integrate_adaptive(f, fp.diagonal, z_breakpoints(Y, X), q)
    return res.value, res


def reliability(
    fp: Floorplan,
    p: DsParams | None = None,
    q: QuadratureSpec | None = None,
    mode: str = "variance",
) -> tuple[float, _Integral]:
    """Distance-averaged standard deviation of the per-link RMS-DS.

    ``mode="variance"`` (default) mixes branch variances with room weights
    ``S_i/V`` and LOS weights ``Z(d, l_i, m_i) / Z(d, Y, X)``.
    ``mode="strict"`` keeps the unweighted room sum with standard deviations
    (not variances) under the square root.
    """
    if mode not in RELIABILITY_MODES:
        raise ValueError(f"mode must be one of {RELIABILITY_MODES}")
    p = default_params() if p is None else p
    q = QuadratureSpec() if q is None else q
    _check_params(fp, p)
    X, Y, V = fp.x, fp.y, fp.area
    scale = 2.0 * math.pi / (X * Y)

    terms = []
    points = list(z_breakpoints(Y, X))
    for (room_type, l, m), members in iter_room_groups(fp):
        s_los = p.row(room_type, LOS).tau_sigma
        s_nlos = p.row(room_type, NLOS).tau_sigma
        if mode == "variance":
            weight = sum(fp.rooms[k].area for k in members) / V
            s_los, s_nlos = s_los**2, s_nlos**2
        else:
            weight = float(len(members))
        terms.append((weight, l, m, s_los, s_nlos))
        points.extend(z_breakpoints(l, m))

    def f(d: float) -> float:
        if d <= 0.0:
            return 0.0
        zb = z_kernel(d, Y, X)
        if zb <= 0.0:
            return 0.0
        acc = 0.0
        for weight, l, m, s_los, s_nlos in terms:
            pl = min(z_kernel(d, l, m) / zb, 1.0)
            acc += weight * (pl * s_los + (1.0 - pl) * s_nlos)
        return scale * d * zb * math.sqrt(acc)

    res = integrate_adaptive(f, fp.diagonal, points, q)
    return res.value, res


def ds_gain(
    fp: Floorplan,
    p: DsParams | None = None,
    q: QuadratureSpec | None = None,
    *,
    reliability_mode: str = "variance",
    threads: int | None = None,
) -> EvalReport:
    """Evaluate DS gain and reliability of a floorplan."""
    p = default_params() if p is None else p
    q = QuadratureSpec() if q is None else q
    e_in, contributions, in_diag = expected_tau_indoor(fp, p, q, threads)
    e_out, out_diag = expected_tau_open(fp, q, p.c)
    sigma, rel_diag = reliability(fp, p, q, reliability_mode)
    return EvalReport(
        floorplan_id=fp.id,
        e_tau_indoor=e_in,
        e_tau_open=e_out,
        ds_gain=e_in - e_out,
        reliability_sigma=sigma,
        contributions=tuple(contributions),
        evaluations=in_diag.evaluations + out_diag.evaluations + rel_diag.evaluations,
        error_estimate=in_diag.error + out_diag.error,
        reliability_mode=reliability_mode,
    )


def _branch_weights(d: np.ndarray, fp: Floorplan):
    """Yield (room_type, area weight, LOS probability array) per room group."""
    zb = np.asarray(z_kernel(d, fp.y, fp.x))
    safe = np.where(zb > 0, zb, 1.0)
    for (room_type, l, m), members in iter_room_groups(fp):
        w = sum(fp.rooms[k].area for k in members) / fp.area
        pl = np.where(zb > 0, np.minimum(np.asarray(z_kernel(d, l, m)) / safe, 1.0), 0.0)
        yield room_type, w, pl


def los_fraction(d, fp: Floorplan):
    """Building-wide LOS probability of a link of length ``d`` (both ends inside)."""
    d = np.asarray(d, dtype=float)
    out = sum(w * pl for _, w, pl in _branch_weights(d, fp))
    return float(out) if np.ndim(out) == 0 else out


def conditional_tau_mean(d, fp: Floorplan, p: DsParams | None = None):
    """Analytic ``E[tau_I | d]`` in ns for a link of length ``d`` inside ``fp``."""
    p = default_params() if p is None else p
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    for room_type, w, pl in _branch_weights(d, fp):
        t_los = truncated_mean(tau_indoor_distribution(d, room_type, LOS, p))
        t_nlos = truncated_mean(tau_indoor_distribution(d, room_type, NLOS, p))
        out = out + w * (pl * t_los + (1.0 - pl) * t_nlos)
    return float(out) if out.ndim == 0 else out


def tau_mixture_cdf(tau, d: float, fp: Floorplan, p: DsParams | None = None):
    """Analytic CDF of the zero-clamped indoor RMS-DS at fixed link length ``d``."""
    p = default_params() if p is None else p
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    for room_type, w, pl in _branch_weights(np.asarray(float(d)), fp):
        pl = float(pl)
        f_los = tau_indoor_distribution(d, room_type, LOS, p).cdf(tau)
        f_nlos = tau_indoor_distribution(d, room_type, NLOS, p).cdf(tau)
        out = out + w * (pl * f_los + (1.0 - pl) * f_nlos)
    return float(out) if out.ndim == 0 else out
