import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from dsgain import (
    CORRIDOR,
    LOS,
    NLOS,
    OFFICE,
    ChannelRow,
    DomainError,
    DsParams,
    ParamError,
    SchemaError,
    TauDistribution,
    default_params,
    load_params,
    mean_path_loss,
    tau_indoor_distribution,
    tau_open_space,
    truncated_mean,
)
from dsgain.channel import SPEED_OF_LIGHT, params_from_dict


def test_default_table_values(params):
    assert params.L0 == 40.7 and params.d0 == 1.0
    assert params.row(OFFICE, LOS) == ChannelRow(0.40, -3.43, 2.34, 2.55, 0.37, 3.76)
    assert params.row(CORRIDOR, NLOS) == ChannelRow(0.39, -8.04, 2.97, 1.82, 5.56, 2.73)
    assert params.room_types == {OFFICE, CORRIDOR}


@pytest.mark.parametrize(
    "d, room_type, blockage, expected",
    [
        (1.0, OFFICE, LOS, 41.07),
        (10.0, OFFICE, NLOS, 40.7 + 24.0 + 10.73),
        (10.0, CORRIDOR, LOS, 40.7 + 18.1 + 0.32),
        (100.0, CORRIDOR, NLOS, 40.7 + 36.4 + 5.56),
    ],
)
def test_mean_path_loss_hand_values(params, d, room_type, blockage, expected):
    assert mean_path_loss(d, room_type, blockage, params) == pytest.approx(expected, abs=1e-12)


def test_path_loss_rejects_nonpositive(params):
    with pytest.raises(DomainError):
        mean_path_loss(0.0, OFFICE, LOS, params)
    with pytest.raises(DomainError):
        tau_indoor_distribution(-1.0, OFFICE, LOS, params)


def test_tau_distribution_at_reference_distance(params):
    dist = tau_indoor_distribution(1.0, OFFICE, LOS, params)
    assert dist.mu == pytest.approx(0.4 * 40.7 + 0.4 * 0.37 - 3.43, abs=1e-12)
    assert dist.sigma == pytest.approx(math.hypot(2.34, 0.4 * 3.76), abs=1e-12)


def test_tau_distribution_vectorized(params):
    d = np.array([1.0, 10.0, 100.0])
    dist = tau_indoor_distribution(d, OFFICE, NLOS, params)
    assert np.allclose(np.diff(dist.mu), 0.4 * 24.0)


def test_tau_cdf_clamped():
    dist = TauDistribution(1.0, 2.0)
    assert dist.cdf(-0.5) == 0.0
    assert dist.cdf(0.0) == pytest.approx(stats.norm.cdf(0, 1, 2))
    assert dist.cdf(50.0) == pytest.approx(1.0)
    assert TauDistribution(3.0, 0.0).cdf(2.9) == 0.0
    assert TauDistribution(3.0, 0.0).cdf(3.0) == 1.0


def _truncated_oracle(mu, sigma):
    lo, hi = max(0.0, mu - 12 * sigma), max(0.0, mu + 12 * sigma)
    if hi == 0.0:
        return 0.0
    pts = [mu] if lo < mu < hi else None
    return integrate.quad(lambda t: t * stats.norm.pdf(t, mu, sigma), lo, hi, points=pts, epsabs=1e-13, limit=200)[0]


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 40), st.floats(0.1, 10))
def test_truncated_mean_matches_quadrature(mu, sigma):
    assert truncated_mean(mu, sigma) == pytest.approx(_truncated_oracle(mu, sigma), abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 40), st.floats(0.1, 10))
def test_truncated_mean_bounds(mu, sigma):
    v = truncated_mean(mu, sigma)
    assert v >= max(mu, 0.0) - 1e-12


def test_truncated_mean_limits():
    assert truncated_mean(-np.inf, 2.0) == 0.0
    assert truncated_mean(0.0, 1.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert truncated_mean(5.0, 0.0) == 5.0 and truncated_mean(-5.0, 0.0) == 0.0
    assert truncated_mean(TauDistribution(13.0, 2.781)) == pytest.approx(13.0, abs=1e-4)


def test_truncated_mean_monte_carlo():
    rng = np.random.default_rng(3)
    x = np.maximum(rng.normal(1.5, 3.0, 2_000_000), 0)
    assert truncated_mean(1.5, 3.0) == pytest.approx(x.mean(), abs=4 * x.std() / math.sqrt(x.size))


def test_open_space_touching_antennas():
    # heights 4 and 3: direct path 1 m, reflected 7 m
    assert tau_open_space(0.0, 4.0, 3.0) == pytest.approx(6.0 / (2 * SPEED_OF_LIGHT) * 1e9, rel=1e-12)
    assert tau_open_space(0.0, 4.0, 3.0) == pytest.approx(10.00692, abs=1e-5)


def test_open_space_far_field():
    # the delay gap tends to 2 h_T h_R / d
    d = 1000.0
    assert tau_open_space(d, 4.0, 3.0) == pytest.approx(24.0 / d / (2 * SPEED_OF_LIGHT) * 1e9, rel=1e-4)
    assert tau_open_space(d, 4.0, 3.0) == pytest.approx(0.0400, abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 30), st.floats(0.5, 30))
def test_open_space_positive_and_decreasing(hT, hR):
    d = np.linspace(0, 500, 2001)
    tau = tau_open_space(d, hT, hR)
    assert np.all(tau > 0)
    assert np.all(np.diff(tau) < 0)


def test_open_space_equal_heights():
    # image method: reflected path is sqrt(d^2 + (2h)^2)
    d = np.array([0.5, 3.0, 40.0])
    expected = (np.sqrt(d**2 + 36) - d) / (2 * SPEED_OF_LIGHT) * 1e9
    assert np.allclose(tau_open_space(d, 3.0, 3.0), expected, rtol=1e-12)


def test_open_space_domain():
    with pytest.raises(DomainError):
        tau_open_space(-1.0, 4.0, 3.0)
    with pytest.raises(DomainError):
        tau_open_space(1.0, 0.0, 3.0)


def test_row_validation():
    with pytest.raises(ParamError):
        ChannelRow(0.4, 0, -1, 2, 0, 1)
    with pytest.raises(ParamError):
        ChannelRow(0.4, 0, 1, 0, 0, 1)


def test_params_need_both_blockages():
    with pytest.raises(ParamError):
        DsParams(rows={(OFFICE, LOS): ChannelRow(0.4, 0, 1, 2, 0, 1)})


def test_unknown_row_lookup(params):
    with pytest.raises(ParamError):
        params.row("lab", LOS)


_LAB = [
    {"room_type": "lab", "blockage": b, "k": 0.3, "B": -1.0, "sigma": 2.0, "n": 2.0, "C": c, "sigma_s": 3.0}
    for b, c in (("LOS", 0.0), ("NLOS", 6.0))
]


def test_override_extends_default():
    p = params_from_dict({"rows": _LAB})
    assert p.has_type("lab") and p.has_type(OFFICE)
    assert p.row("lab", NLOS).C == 6.0


def test_override_replace():
    p = params_from_dict({"rows": _LAB, "replace": True, "L0": 41.0})
    assert p.room_types == {"lab"}
    assert p.L0 == 41.0


def test_override_files(tmp_path):
    jpath = tmp_path / "p.json"
    jpath.write_text(json.dumps({"rows": _LAB}))
    tpath = tmp_path / "p.toml"
    lines = []
    for r in _LAB:
        lines.append("[[rows]]")
        lines += [f'{k} = "{v}"' if isinstance(v, str) else f"{k} = {v}" for k, v in r.items()]
    tpath.write_text("\n".join(lines) + "\n")
    assert load_params(jpath) == load_params(tpath)


@pytest.mark.parametrize(
    "doc",
    [
        {"rows": [{"room_type": "lab", "blockage": "LOS"}]},
        {"rows": [{**_LAB[0], "blockage": "maybe"}]},
        {"L0": "loud"},
        [1, 2],
    ],
)
def test_override_schema_errors(doc):
    with pytest.raises(SchemaError):
        params_from_dict(doc)


def test_override_missing_blockage_row():
    with pytest.raises(ParamError):
        params_from_dict({"rows": _LAB[:1]})


def test_bad_param_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text("{oops")
    with pytest.raises(SchemaError):
        load_params(path)


def test_default_params_fresh_each_call():
    assert default_params() == default_params()
