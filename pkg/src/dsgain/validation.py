"""Input coercion helpers shared by the estimators and the CLI."""

from __future__ import annotations

import os
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np

from .channel import DsParams, default_params, load_params, params_from_dict
from .exceptions import DomainError, SchemaError
from .layout import Floorplan, load_floorplan, parse_floorplan

__all__ = ["check_params", "check_floorplan", "check_floorplans", "check_distances"]


def check_params(params) -> DsParams:
    """None -> default table; path -> loaded file; mapping -> override document."""
    if params is None:
        return default_params()
    if isinstance(params, DsParams):
        return params
    if isinstance(params, (str, os.PathLike)):
        return load_params(params)
    if isinstance(params, Mapping):
        return params_from_dict(dict(params))
    raise SchemaError(f"cannot interpret {type(params).__name__} as a parameter table")


def check_floorplan(obj, params: DsParams | None = None) -> Floorplan:
    """Accept a Floorplan, a decoded dict, a JSON string or a path to a JSON file."""
    if isinstance(obj, Floorplan):
        return obj
    if isinstance(obj, Mapping):
        return parse_floorplan(dict(obj), params)
    if isinstance(obj, os.PathLike) or (isinstance(obj, str) and not obj.lstrip().startswith("{")):
        return load_floorplan(Path(obj), params)
    if isinstance(obj, (str, bytes)):
        return parse_floorplan(obj, params)
    raise SchemaError(f"cannot interpret {type(obj).__name__} as a floorplan")


def check_floorplans(X, params: DsParams | None = None) -> list[Floorplan]:
    """A single floorplan-like object or an iterable of them, as a list."""
    if isinstance(X, (Floorplan, Mapping, str, bytes, os.PathLike)):
        return [check_floorplan(X, params)]
    if isinstance(X, Iterable):
        out = [check_floorplan(x, params) for x in X]
        if not out:
            raise SchemaError("no floorplans given")
        return out
    raise SchemaError(f"cannot interpret {type(X).__name__} as floorplans")


def check_distances(d) -> np.ndarray:
    """Finite, non-negative distances as a 1-D float array."""
    arr = np.atleast_1d(np.asarray(d, dtype=float)).ravel()
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("distances must be finite and non-negative")
    return arr
