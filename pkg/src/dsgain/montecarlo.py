"""Monte-Carlo link simulator used as an independent oracle.

Transmitters and receivers are dropped uniformly over the outline and paired
one-to-one. A link is LOS exactly when both ends fall in the same room; the
room type comes from the transmitter's room. Indoor RMS-DS is drawn from the
regression Gaussian and clamped at zero; the open-space value is the
deterministic two-ray delay spread.

Random streams: links are processed in fixed blocks of ``BLOCK_SIZE``; block
``b`` of a run with seed ``s`` draws from ``Philox(SeedSequence([s, b]))``.
Since block boundaries never depend on the worker count, serial and threaded
runs produce identical bits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

import numpy as np

from .channel import LOS, NLOS, DsParams, default_params, tau_indoor_distribution, tau_open_space, truncated_mean
from .exceptions import InsufficientSamplesError, ParamError
from .layout import Floorplan, room_index

__all__ = [
    "BLOCK_SIZE",
    "LinkSample",
    "LinkBatch",
    "SimReport",
    "simulate",
    "sample_at_distance",
    "empirical_tau_cdf",
    "empirical_distance_pdf",
    "empirical_reliability",
    "component_mean_fn",
    "write_xy_csv",
    "SAMPLE_CSV_COLUMNS",
]

BLOCK_SIZE = 8192
MIN_CDF_SAMPLES = 100
MIN_RELIABILITY_SAMPLES = 10_000

SAMPLE_CSV_COLUMNS = (
    "tx_x", "tx_y", "rx_x", "rx_y", "d_m", "tx_room", "room_type", "blockage", "tau_indoor_ns", "tau_open_ns",
)


@dataclass(frozen=True)
class LinkSample:
    tx: tuple[float, float]
    rx: tuple[float, float]
    d: float
    tx_room_id: str
    blockage: str
    room_type: str
    tau_indoor: float
    tau_open: float


@dataclass
class LinkBatch:
    """Columnar store of simulated links; iterating yields ``LinkSample``."""

    floorplan: Floorplan
    tx: np.ndarray  # (n, 2)
    rx: np.ndarray  # (n, 2)
    d: np.ndarray
    tx_room: np.ndarray  # index into floorplan.rooms
    los: np.ndarray  # bool
    tau_indoor: np.ndarray
    tau_open: np.ndarray

    def __len__(self) -> int:
        return len(self.d)

    def __iter__(self) -> Iterator[LinkSample]:
        rooms = self.floorplan.rooms
        for k in range(len(self)):
            r = rooms[self.tx_room[k]]
            yield LinkSample(
                (float(self.tx[k, 0]), float(self.tx[k, 1])),
                (float(self.rx[k, 0]), float(self.rx[k, 1])),
                float(self.d[k]),
                r.id,
                LOS if self.los[k] else NLOS,
                r.room_type,
                float(self.tau_indoor[k]),
                float(self.tau_open[k]),
            )

    @property
    def room_types(self) -> np.ndarray:
        types = np.array([r.room_type for r in self.floorplan.rooms], dtype=object)
        return types[self.tx_room]

    def groups(self) -> Iterator[tuple[str, str, np.ndarray]]:
        """Yield (room_type, blockage, boolean mask) for every non-empty group."""
        types = self.room_types
        for t in sorted(set(types)):
            is_t = types == t
            for b, m in ((LOS, self.los), (NLOS, ~self.los)):
                mask = is_t & m
                if mask.any():
                    yield t, b, mask

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_CSV_COLUMNS)
        for s in self:
            w.writerow([
                repr(s.tx[0]), repr(s.tx[1]), repr(s.rx[0]), repr(s.rx[1]), repr(s.d),
                s.tx_room_id, s.room_type, s.blockage, repr(s.tau_indoor), repr(s.tau_open),
            ])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass(frozen=True)
class SimReport:
    n_links: int
    seed: int
    mean_tau_indoor: float
    se_tau_indoor: float
    mean_tau_open: float
    se_tau_open: float
    ds_gain_sim: float
    se_ds_gain: float
    los_fraction: float
    reliability: float | None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


class _Tables:
    """Per-link parameter lookup keyed by (room type, blockage) codes."""

    def __init__(self, fp: Floorplan, p: DsParams):
        types = sorted(fp.room_types)
        missing = [t for t in types if not p.has_type(t)]
        if missing:
            raise ParamError(f"room types {missing} have no LOS/NLOS rows in the parameter table")
        index = {t: i for i, t in enumerate(types)}
        self.room_code = np.array([index[r.room_type] for r in fp.rooms], dtype=np.int64)
        rows = [p.row(t, b) for t in types for b in (LOS, NLOS)]
        self.k = np.array([r.k for r in rows])
        self.kn = np.array([r.k * r.n for r in rows])
        self.offset = np.array([r.k * p.L0 + r.k * r.C + r.B for r in rows])
        self.sigma = np.array([r.tau_sigma for r in rows])
        self.d0 = p.d0

    def draw(self, d, tx_room, los, z):
        code = 2 * self.room_code[tx_room] + np.where(los, 0, 1)
        with np.errstate(divide="ignore"):
            logd = np.log10(d / self.d0)
        mu = self.offset[code] + 10.0 * self.kn[code] * logd
        return np.maximum(mu + self.sigma[code] * z, 0.0)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(block)])))


def _assign_rooms(fp: Floorplan, xs, ys) -> np.ndarray:
    idx = room_index(fp, xs, ys)
    lost = idx < 0
    if lost.any():
        # points in float round-off slivers between rooms; take the nearest room
        centers = np.array([(r.x0 + r.w / 2, r.y0 + r.h / 2) for r in fp.rooms])
        half = np.array([(r.w / 2, r.h / 2) for r in fp.rooms])
        gap = np.abs(np.stack([xs[lost], ys[lost]], axis=1)[:, None, :] - centers[None]) - half[None]
        idx[lost] = np.argmin(np.clip(gap, 0, None).max(axis=2), axis=1)
    return idx


def _run_blocks(fn, n_blocks: int, threads: int | None):
    if threads and threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(n_blocks)))
    return [fn(b) for b in range(n_blocks)]


def _concat(fp: Floorplan, parts) -> LinkBatch:
    cols = list(zip(*parts))
    return LinkBatch(fp, *(np.concatenate(c) for c in cols))


def _finish(fp, tables, tx, rx, z, h_T, h_R, c):
    d = np.hypot(rx[:, 0] - tx[:, 0], rx[:, 1] - tx[:, 1])
    rt = _assign_rooms(fp, tx[:, 0], tx[:, 1])
    rr = _assign_rooms(fp, rx[:, 0], rx[:, 1])
    los = rt == rr
    tau_i = tables.draw(d, rt, los, z)
    tau_o = tau_open_space(d, h_T, h_R, c)
    return tx, rx, d, rt, los, tau_i, np.asarray(tau_o, dtype=float)


def simulate(
    fp: Floorplan,
    p: DsParams | None = None,
    n_links: int = 10_000,
    seed: int = 0,
    threads: int | None = None,
) -> tuple[SimReport, LinkBatch]:
    """Simulate ``n_links`` independent uniform Tx/Rx pairs over the outline."""
    if int(n_links) != n_links or n_links < 1:
        raise ValueError("n_links must be a positive integer")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    n_links = int(n_links)
    p = default_params() if p is None else p
    tables = _Tables(fp, p)
    scale = np.array([fp.x, fp.y])
    n_blocks = -(-n_links // BLOCK_SIZE)

    def block(b: int):
        m = min(BLOCK_SIZE, n_links - b * BLOCK_SIZE)
        rng = _block_rng(seed, b)
        u = rng.random((m, 4))
        z = rng.standard_normal(m)
        return _finish(fp, tables, u[:, :2] * scale, u[:, 2:] * scale, z, fp.tx_height, fp.rx_height, p.c)

    batch = _concat(fp, _run_blocks(block, n_blocks, threads))
    return _summarize(batch, p, seed), batch


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return mean, se


def _summarize(batch: LinkBatch, p: DsParams, seed: int) -> SimReport:
    mi, sei = _mean_se(batch.tau_indoor)
    mo, seo = _mean_se(batch.tau_open)
    _, seg = _mean_se(batch.tau_indoor - batch.tau_open)
    rel = None
    if len(batch) >= MIN_RELIABILITY_SAMPLES:
        rel = empirical_reliability(batch, component_mean_fn(p))
    return SimReport(
        n_links=len(batch),
        seed=int(seed),
        mean_tau_indoor=mi,
        se_tau_indoor=sei,
        mean_tau_open=mo,
        se_tau_open=seo,
        ds_gain_sim=mi - mo,
        se_ds_gain=seg,
        los_fraction=float(np.mean(batch.los)),
        reliability=rel,
    )


def sample_at_distance(
    fp: Floorplan,
    p: DsParams | None,
    d: float,
    n: int,
    seed: int = 0,
    threads: int | None = None,
) -> LinkBatch:
    """Links of fixed length ``d``: uniform Tx, Rx uniform on the circle of
    radius ``d`` around it, rejected when outside the outline."""
    p = default_params() if p is None else p
    if not (0 < d < fp.diagonal):
        raise InsufficientSamplesError(f"no link of length {d} m fits in a {fp.x}x{fp.y} outline")
    tables = _Tables(fp, p)
    scale = np.array([fp.x, fp.y])
    # per round, enough blocks to cover the remaining count at a pessimistic acceptance rate
    max_blocks = max(64, 1000 * (-(-n // BLOCK_SIZE)))

    def block(b: int):
        rng = _block_rng(seed, b)
        u = rng.random((BLOCK_SIZE, 3))
        z = rng.standard_normal(BLOCK_SIZE)
        tx = u[:, :2] * scale
        theta = 2.0 * math.pi * u[:, 2]
        rx = tx + d * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        ok = (rx[:, 0] >= 0) & (rx[:, 0] < fp.x) & (rx[:, 1] >= 0) & (rx[:, 1] < fp.y)
        return _finish(fp, tables, tx[ok], rx[ok], z[ok], fp.tx_height, fp.rx_height, p.c)

    parts = []
    have = 0
    next_block = 0
    workers = max(1, threads or 1)
    while have < n:
        if next_block >= max_blocks:
            raise InsufficientSamplesError(f"acceptance too low to collect {n} links at d={d} m")
        round_ = _run_blocks(lambda i: block(next_block + i), workers, threads)
        next_block += workers
        for part in round_:
            if have >= n:
                break
            parts.append(part)
            have += len(part[2])
    batch = _concat(fp, parts)
    if len(batch) > n:
        batch = LinkBatch(fp, *(getattr(batch, f)[:n] for f in
                                ("tx", "rx", "d", "tx_room", "los", "tau_indoor", "tau_open")))
    return batch


def empirical_tau_cdf(batch: LinkBatch, d_target: float, d_window: float) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF of indoor RMS-DS for links with ``|d - d_target| <= d_window / 2``.

    Returns sorted tau values and the ECDF value at each.
    """
    if not d_window > 0:
        raise ValueError("d_window must be positive")
    sel = np.abs(batch.d - d_target) <= d_window / 2.0
    tau = np.sort(batch.tau_indoor[sel])
    if len(tau) < MIN_CDF_SAMPLES:
        raise InsufficientSamplesError(
            f"only {len(tau)} links within {d_window / 2} m of d={d_target} m (need {MIN_CDF_SAMPLES})"
        )
    return tau, np.arange(1, len(tau) + 1) / len(tau)


def empirical_distance_pdf(batch: LinkBatch, bin_width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Normalized histogram of link lengths: (bin centers, density)."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    top = max(float(np.max(batch.d)), bin_width) if len(batch) else bin_width
    edges = np.arange(0.0, top + bin_width, bin_width)
    counts, edges = np.histogram(batch.d, bins=edges)
    density = counts / (len(batch) * bin_width) if len(batch) else counts.astype(float)
    return 0.5 * (edges[:-1] + edges[1:]), density


MeanFn = Callable[[np.ndarray, str, str], np.ndarray]


def component_mean_fn(p: DsParams | None = None) -> MeanFn:
    """Analytic mean of the clamped RMS-DS for a link's (type, blockage) branch."""
    p = default_params() if p is None else p

    def fn(d: np.ndarray, room_type: str, blockage: str) -> np.ndarray:
        d = np.maximum(np.asarray(d, dtype=float), np.finfo(float).tiny)
        return np.asarray(truncated_mean(tau_indoor_distribution(d, room_type, blockage, p)))

    return fn


def empirical_reliability(batch: LinkBatch, analytic_mean_fn: MeanFn, bin_width: float = 1.0) -> float:
    """Distance-binned RMS deviation of per-link DS gain from its analytic mean.

    Each link's deviation is ``(tau_I - tau_O) - (mean - tau_O)`` where
    ``mean = analytic_mean_fn(d, room_type, blockage)``. Per distance bin
    the root-mean-square deviation is taken, then bins are averaged with
    their sample mass.
    """
    n = len(batch)
    if n < MIN_RELIABILITY_SAMPLES:
        raise InsufficientSamplesError(f"need at least {MIN_RELIABILITY_SAMPLES} links, got {n}")
    mean = np.empty(n)
    for room_type, blockage, mask in batch.groups():
        mean[mask] = analytic_mean_fn(batch.d[mask], room_type, blockage)
    gain = batch.tau_indoor - batch.tau_open
    dev = gain - (mean - batch.tau_open)
    bins = np.floor(batch.d / bin_width).astype(np.int64)
    sq = np.bincount(bins, weights=dev * dev)
    cnt = np.bincount(bins)
    used = cnt > 0
    rms = np.sqrt(sq[used] / cnt[used])
    return float(np.sum(cnt[used] / n * rms))


def write_xy_csv(fh, x, y, header: tuple[str, str] = ("x", "value")) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for a, b in zip(np.asarray(x), np.asarray(y)):
        w.writerow([repr(float(a)), repr(float(b))])
