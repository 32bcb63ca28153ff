import json
import math

import numpy as np
import pytest

import oddflow


def grid(n=32):
    x = np.arange(n) * 2 * np.pi / n
    return np.meshgrid(x, x, indexing="ij")


def test_identity_and_projection():
    X, Y = grid()
    psi = np.sin(X) * np.cos(2 * Y) + 0.3 * np.cos(3 * X + Y)
    ux, uy = oddflow.perp_gradient(psi)
    assert np.max(np.abs(oddflow.divergence(ux, uy))) < 1e-12
    assert oddflow.gradient_identity_residual(ux, uy) < 1e-11
    px, py = oddflow.leray_project(ux, uy)
    assert np.max(np.abs(px - ux)) < 1e-12
    w = oddflow.curl(ux, uy)
    # omega = Lap psi
    lap = -(np.sin(X) * np.cos(2 * Y)) * 5 - 0.3 * 10 * np.cos(3 * X + Y)
    assert np.max(np.abs(w - lap)) < 1e-11


def test_variable_poisson_manufactured():
    X, Y = grid(64)
    a = 2 + np.cos(X) * np.cos(Y)
    pi_star = np.sin(X + Y)
    Fx = -a * np.cos(X + Y)
    Fy = -a * np.cos(X + Y)
    out = oddflow.solve_variable_poisson(a, Fx, Fy)
    assert out["iterations"] <= 200
    assert out["energy_bound_holds"]
    assert np.max(np.abs(out["Pi"] - pi_star)) < 1e-8


def test_viscosity_g():
    assert oddflow.viscosity_g(2.0, alpha=2.0, rho_star=1.0) == pytest.approx(4.0)
    assert oddflow.viscosity_g(math.e, rho_star=1.0) == pytest.approx(2.0)
    with pytest.raises(oddflow.VacuumError):
        oddflow.viscosity_g(0.5, rho_star=1.0)


def test_simulate_and_config_errors():
    res = oddflow.run({"grid": {"n": 16}, "dynamics": {"t_end": 0.05, "dt": 0.01}, "output": {"every": 1}})
    assert res["steps"] == 5
    assert len(res["records"]) == 6
    e0 = res["records"][0]["E_u"]
    assert abs(res["records"][-1]["E_u"] - e0) / e0 < 1e-7
    assert res["rho"].shape == (16, 16)
    with pytest.raises(oddflow.ConfigError, match="viscsity.a"):
        oddflow.run({"viscsity": {"a": 1}})


def test_littlewood_paley():
    rng = np.random.default_rng(1)
    u = rng.standard_normal((32, 32))
    v = rng.standard_normal((32, 32))
    # band-limit both fields so the refined products are exact
    keep = (np.abs(np.fft.fftfreq(32, 1 / 32))[:, None] <= 10) & (np.arange(17)[None, :] <= 10)
    u = np.fft.irfft2(np.fft.rfft2(u) * keep, s=u.shape)
    v = np.fft.irfft2(np.fft.rfft2(v) * keep, s=v.shape)
    blocks = oddflow.dyadic_blocks(u)
    assert np.max(np.abs(sum(blocks) - u)) < 1e-11
    b = oddflow.bony_decompose(u, v)
    assert np.max(np.abs(b["T_uv"] + b["T_vu"] + b["R"] - b["uv"])) < 1e-10
    assert oddflow.sobolev_norm(np.ones((16, 16)), 1.0) == pytest.approx(2 * np.pi)


def test_schema_lists_diag_columns():
    schema = json.loads(oddflow.csv_schema())
    names = [c["name"] for c in schema["diag.csv"]]
    assert names[0] == "t"
    assert "pde_residual" in names
