"""Statistical channel models.

Indoor RMS delay spread is linear in log-distance path loss plus Gaussian
scatter; the open-space baseline is the two-ray (direct + ground reflected)
model. All delays are in nanoseconds, path loss in dB, lengths in meters.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.special import erfc

from .exceptions import DomainError, ParamError, SchemaError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "OFFICE",
    "CORRIDOR",
    "LOS",
    "NLOS",
    "SPEED_OF_LIGHT",
    "ChannelRow",
    "DsParams",
    "TauDistribution",
    "default_params",
    "load_params",
    "mean_path_loss",
    "tau_indoor_distribution",
    "tau_open_space",
    "truncated_mean",
]

OFFICE = "office"
CORRIDOR = "corridor"
LOS = "LOS"
NLOS = "NLOS"
BLOCKAGES = (LOS, NLOS)

SPEED_OF_LIGHT = 2.99792458e8


@dataclass(frozen=True)
class ChannelRow:
    """Regression parameters for one (room type, blockage) pair.

    ``k`` is in ns/dB, ``B`` and ``sigma`` in ns, ``C`` and ``sigma_s`` in dB.
    """

    k: float
    B: float
    sigma: float
    n: float
    C: float
    sigma_s: float

    def __post_init__(self):
        if self.sigma < 0 or self.sigma_s < 0:
            raise ParamError("sigma and sigma_s must be non-negative")
        if self.n <= 0:
            raise ParamError("path-loss exponent n must be positive")
        if self.k < 0:
            raise ParamError("k must be non-negative")

    @property
    def tau_sigma(self) -> float:
        """Total RMS-DS standard deviation with shadowing folded in."""
        return math.sqrt(self.sigma**2 + self.k**2 * self.sigma_s**2)


@dataclass(frozen=True)
class DsParams:
    rows: Mapping[tuple[str, str], ChannelRow]
    L0: float = 40.7
    d0: float = 1.0
    fc: float = 2.595e9
    c: float = SPEED_OF_LIGHT
    _types: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = dict(self.rows)
        object.__setattr__(self, "rows", rows)
        types = {t for t, _ in rows}
        for t in types:
            for b in BLOCKAGES:
                if (t, b) not in rows:
                    raise ParamError(f"room type {t!r} lacks a {b} row")
        object.__setattr__(self, "_types", frozenset(types))

    @property
    def room_types(self) -> frozenset[str]:
        return self._types

    def has_type(self, room_type: str) -> bool:
        return room_type in self._types

    def row(self, room_type: str, blockage: str) -> ChannelRow:
        try:
            return self.rows[(room_type, blockage)]
        except KeyError:
            raise ParamError(f"no parameters for ({room_type!r}, {blockage!r})") from None

    def with_rows(self, extra: Mapping[tuple[str, str], ChannelRow]) -> "DsParams":
        return replace(self, rows={**self.rows, **extra})


def default_params() -> DsParams:
    """Measured 2.595 GHz office/corridor table, L(d0) = 40.7 dB at 1 m."""
    return DsParams(
        rows={
            (OFFICE, LOS): ChannelRow(0.40, -3.43, 2.34, 2.55, 0.37, 3.76),
            (OFFICE, NLOS): ChannelRow(0.40, -4.77, 3.30, 2.40, 10.73, 3.62),
            (CORRIDOR, LOS): ChannelRow(0.38, -5.72, 2.40, 1.81, 0.32, 2.69),
            (CORRIDOR, NLOS): ChannelRow(0.39, -8.04, 2.97, 1.82, 5.56, 2.73),
        },
        L0=40.7,
    )


_ROW_FIELDS = ("k", "B", "sigma", "n", "C", "sigma_s")


def params_from_dict(doc: dict, base: DsParams | None = None) -> DsParams:
    """Build a table from a decoded override document.

    Rows in ``doc["rows"]`` extend or replace rows of ``base`` (the default
    table unless ``doc["replace"]`` is true). Scalars ``L0``/``d0``/``fc``/``c``
    are optional.
    """
    if not isinstance(doc, dict):
        raise SchemaError("parameter document must be an object")
    base = default_params() if base is None else base
    rows = {} if doc.get("replace", False) else dict(base.rows)
    for i, raw in enumerate(doc.get("rows", [])):
        try:
            key = (str(raw["room_type"]).lower(), str(raw["blockage"]).upper())
            vals = {f: float(raw[f]) for f in _ROW_FIELDS}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"rows[{i}]: {exc!r}") from None
        if key[1] not in BLOCKAGES:
            raise SchemaError(f"rows[{i}]: blockage must be LOS or NLOS")
        rows[key] = ChannelRow(**vals)
    scalars = {}
    for name in ("L0", "d0", "fc", "c"):
        if name in doc:
            try:
                scalars[name] = float(doc[name])
            except (TypeError, ValueError):
                raise SchemaError(f"{name} must be a number") from None
    return DsParams(rows=rows, **{**{"L0": base.L0, "d0": base.d0, "fc": base.fc, "c": base.c}, **scalars})


def load_params(path) -> DsParams:
    """Read a JSON or TOML override file (chosen by suffix)."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        if path.suffix.lower() == ".toml":
            doc = tomllib.loads(raw.decode("utf-8"))
        else:
            doc = json.loads(raw)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"cannot parse parameter file {path}: {exc}") from exc
    return params_from_dict(doc)


def _check_distance(d):
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise DomainError("distance must be positive")
    return d


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def mean_path_loss(d, room_type: str, blockage: str, p: DsParams):
    """Deterministic part of the log-distance path loss in dB."""
    d = _check_distance(d)
    row = p.row(room_type, blockage)
    return _scalar_or_array(p.L0 + 10.0 * row.n * np.log10(d / p.d0) + row.C)


@dataclass(frozen=True)
class TauDistribution:
    """Gaussian indoor RMS-DS; ``mu`` may be an array over distances."""

    mu: float | np.ndarray
    sigma: float

    def cdf(self, tau):
        """CDF of the zero-clamped variable ``max(N(mu, sigma), 0)``."""
        from scipy.stats import norm

        tau = np.asarray(tau, dtype=float)
        if self.sigma == 0:
            inner = (tau >= self.mu).astype(float)
        else:
            inner = norm.cdf(tau, loc=self.mu, scale=self.sigma)
        out = np.where(tau < 0, 0.0, inner)
        return _scalar_or_array(out)


def tau_indoor_distribution(d, room_type: str, blockage: str, p: DsParams) -> TauDistribution:
    row = p.row(room_type, blockage)
    d = _check_distance(d)
    mu = row.k * p.L0 + 10.0 * row.k * row.n * np.log10(d / p.d0) + row.k * row.C + row.B
    return TauDistribution(_scalar_or_array(mu), row.tau_sigma)


def tau_open_space(d, h_T: float, h_R: float, c: float = SPEED_OF_LIGHT):
    """Two-ray RMS delay spread in ns: half the direct/reflected delay gap."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be non-negative")
    if not (h_T > 0 and h_R > 0):
        raise DomainError("antenna heights must be positive")
    hs = h_T + h_R
    direct = np.sqrt(d * d + (h_T - h_R) ** 2)
    reflected = np.sqrt(h_T**2 + (d * h_T / hs) ** 2) + np.sqrt(h_R**2 + (d * h_R / hs) ** 2)
    return _scalar_or_array(np.abs(direct - reflected) / (2.0 * c) * 1e9)


_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def truncated_mean(mu, sigma=None):
    """``E[max(N(mu, sigma), 0)]`` in closed form.

    Accepts a ``TauDistribution`` as the single argument, or ``mu`` and
    ``sigma`` (``mu`` may be an array, and may be ``-inf``).
    """
    if isinstance(mu, TauDistribution):
        mu, sigma = mu.mu, mu.sigma
    mu = np.asarray(mu, dtype=float)
    if sigma == 0:
        return _scalar_or_array(np.maximum(mu, 0.0))
    with np.errstate(invalid="ignore", over="ignore"):
        t = mu / sigma
        val = sigma / _SQRT2PI * np.exp(-0.5 * t * t) + 0.5 * mu * erfc(-mu / (_SQRT2 * sigma))
    # erfc underflows to 0 well before mu reaches -inf; the limit is 0
    val = np.where(np.isneginf(mu), 0.0, val)
    return _scalar_or_array(val)
