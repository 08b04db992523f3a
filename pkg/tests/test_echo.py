import math

import numpy as np
import pytest
from scipy.integrate import simpson

from fermi_echo.echo import (
    EchoSeries,
    TimeGrid,
    echo_cumulant,
    echo_exact,
    echo_fock_oracle,
    nested_phase_integral,
)
from fermi_echo.trap_gas import (
    SingleParticleModel,
    ThermalState,
    TrapGasConfig,
    build_model,
    coupling_from_alpha,
    solve_chemical_potential,
)


def make_setup(nf=6, beta=2.0, v0=0.5, cutoff=24, gs=1, omega=1.0):
    config = TrapGasConfig(omega=omega, n_fermions=nf, beta=beta,
                           spin_degeneracy=gs, cutoff=cutoff)
    model = build_model(config, v0)
    thermal = solve_chemical_potential(config)
    return config, model, thermal


def test_time_grid():
    grid = TimeGrid(t_max=10.0, n_steps=5)
    assert grid.samples[0] == 0.0
    assert grid.samples[-1] == 10.0
    assert grid.spacing == pytest.approx(2.5, rel=1e-15)
    assert np.allclose(np.diff(grid.samples), grid.spacing, rtol=1e-12)
    with pytest.raises(ValueError):
        TimeGrid(t_max=0.0, n_steps=5)
    with pytest.raises(ValueError):
        TimeGrid(t_max=1.0, n_steps=1)
    with pytest.raises(ValueError):
        grid.samples[0] = 3.0


def test_echo_series_validation():
    grid = TimeGrid(t_max=1.0, n_steps=3)
    good = np.array([1.0, 0.5 + 0.1j, 0.2])
    series = EchoSeries(grid=grid, values=good, method="exact")
    assert series.loschmidt[0] == 1.0
    with pytest.raises(ValueError):
        EchoSeries(grid=grid, values=np.array([0.9, 0.5, 0.2]), method="exact")
    with pytest.raises(ValueError):
        EchoSeries(grid=grid, values=np.array([1.0, 1.5, 0.2]), method="exact")
    with pytest.raises(ValueError):
        EchoSeries(grid=grid, values=good, method="magic")
    with pytest.raises(ValueError):
        EchoSeries(grid=grid, values=good[:2], method="exact")


def test_zero_coupling_is_identity():
    config, model, thermal = make_setup(v0=0.0)
    grid = TimeGrid(t_max=20.0, n_steps=101)
    for series in (
        echo_exact(model, thermal, grid),
        echo_cumulant(model, thermal, grid),
    ):
        assert np.all(series.values == 1.0 + 0.0j)
    small_config, small_model, _ = make_setup(nf=2, v0=0.0, cutoff=5)
    oracle = echo_fock_oracle(small_model, small_config, grid)
    assert np.allclose(oracle.values, 1.0, atol=1e-12)


def test_single_mode_closed_form():
    # one trap mode with occupation n: nu(t) = (1 - n) + n e^{-i V00 t}
    v0 = 0.8
    v00 = math.sqrt(math.pi) * v0
    model = SingleParticleModel(
        energies=np.array([0.5]),
        psi0=np.array([math.pi ** -0.25]),
        v_matrix=np.array([[v00]]),
        v0=v0,
    )
    n = 0.3
    thermal = ThermalState(mu=0.5, occupations=np.array([n]), beta=1.0)
    grid = TimeGrid(t_max=30.0, n_steps=400)
    series = echo_exact(model, thermal, grid)
    expected = (1.0 - n) + n * np.exp(-1j * v00 * grid.samples)
    assert np.allclose(series.values, expected, atol=1e-12)
    # the second cumulant is an approximation here, but the mean phase is exact
    cum = echo_cumulant(model, thermal, grid)
    assert np.allclose(np.abs(cum.values), np.exp(
        -n * (1.0 - n) * v00 ** 2 * grid.samples ** 2 / 2.0), atol=1e-12)


def test_diagonal_potential_factorizes():
    config, model, thermal = make_setup(nf=4, beta=2.0, v0=0.6, cutoff=10)
    diag_model = SingleParticleModel(
        energies=model.energies,
        psi0=model.psi0,
        v_matrix=np.diag(np.diagonal(model.v_matrix)),
        v0=model.v0,
    )
    grid = TimeGrid(t_max=25.0, n_steps=301)
    series = echo_exact(diag_model, thermal, grid)
    occ = thermal.occupations
    shifts = np.diagonal(diag_model.v_matrix)
    expected = np.prod(
        (1.0 - occ)[None, :]
        + occ[None, :] * np.exp(-1j * np.outer(grid.samples, shifts)),
        axis=1,
    )
    assert np.allclose(series.values, expected, atol=1e-12)


def test_nested_phase_integral():
    assert nested_phase_integral(0.0, 2.0) == pytest.approx(2.0)
    assert nested_phase_integral(0.0, 3.0) == pytest.approx(4.5)
    # defining relation: d^2 I / dt^2 = e^{i omega t} with I(0) = I'(0) = 0
    rng = np.random.default_rng(3)
    h = 1e-3
    for _ in range(6):
        omega = float(rng.uniform(-4.0, 4.0))
        t = float(rng.uniform(0.5, 6.0))
        second = (
            nested_phase_integral(omega, t + h)
            - 2.0 * nested_phase_integral(omega, t)
            + nested_phase_integral(omega, t - h)
        ) / h ** 2
        assert second == pytest.approx(np.exp(1j * omega * t), abs=1e-5)
    # small-time series sum_{k>=2} (i omega)^(k-2) t^k / k!
    t, omega = 1e-2, 2.0
    series = (t ** 2 / 2 + 1j * omega * t ** 3 / 6
              - omega ** 2 * t ** 4 / 24 - 1j * omega ** 3 * t ** 5 / 120)
    assert nested_phase_integral(omega, t) == pytest.approx(series, rel=1e-8)
    # direct quadrature of the double integral as an independent route
    omega, t = 1.7, 3.0
    tau1 = np.linspace(0.0, t, 801)
    u = np.linspace(0.0, 1.0, 801)
    inner = tau1 * simpson(np.exp(1j * omega * tau1[:, None] * (1.0 - u[None, :])),
                           x=u, axis=1)
    direct = complex(simpson(inner, x=tau1))
    assert nested_phase_integral(omega, t) == pytest.approx(direct, abs=1e-6)
    # real part stays non-negative
    omegas = rng.uniform(-20.0, 20.0, size=200)
    times = rng.uniform(0.0, 50.0, size=200)
    vals = nested_phase_integral(omegas, times)
    assert np.all(vals.real >= 0.0)
    # broadcasting
    assert nested_phase_integral(omegas[:5, None], times[None, :7]).shape == (5, 7)


def test_cumulant_matches_exact_at_weak_coupling():
    nf, beta = 20, 3.0
    config = TrapGasConfig(omega=1.0, n_fermions=nf, beta=beta,
                           spin_degeneracy=1, cutoff=80)
    thermal = solve_chemical_potential(config)
    grid = TimeGrid(t_max=6.0 * math.pi, n_steps=600)
    diffs = {}
    for alpha in (1e-5, 1e-4):
        model = build_model(config, coupling_from_alpha(alpha, 1.0, nf))
        exact = echo_exact(model, thermal, grid)
        cum = echo_cumulant(model, thermal, grid)
        diffs[alpha] = float(np.max(np.abs(exact.values - cum.values)))
    assert diffs[1e-5] < 2e-5
    # the remainder is the third cumulant, so it shrinks as alpha**1.5
    ratio = diffs[1e-4] / diffs[1e-5]
    assert 20.0 < ratio < 40.0


def test_spin_channels_multiply():
    config, model, thermal = make_setup(nf=8, beta=1.5, v0=0.4, cutoff=30)
    grid = TimeGrid(t_max=15.0, n_steps=200)
    for routine in (echo_exact, echo_cumulant):
        one = routine(model, thermal, grid, spin_degeneracy=1)
        two = routine(model, thermal, grid, spin_degeneracy=2)
        assert np.allclose(two.values, one.values ** 2, atol=1e-12)
        assert two.spin_degeneracy == 2


def test_exact_stays_in_unit_disk():
    config, model, thermal = make_setup(nf=10, beta=4.0, v0=1.5, cutoff=40)
    grid = TimeGrid(t_max=60.0, n_steps=800)
    series = echo_exact(model, thermal, grid)
    assert float(np.abs(series.values).max()) <= 1.0 + 1e-12
    assert series.values[0] == 1.0 + 0.0j


def test_cumulant_stays_in_unit_disk_even_at_strong_coupling():
    config, model, thermal = make_setup(nf=10, beta=3.0, v0=4.0, cutoff=40)
    grid = TimeGrid(t_max=40.0, n_steps=500)
    series = echo_cumulant(model, thermal, grid)
    assert float(np.abs(series.values).max()) <= 1.0


def test_exact_agrees_with_fock_oracle():
    rng = np.random.default_rng(42)
    grid = TimeGrid(t_max=15.0, n_steps=151)
    for cutoff in (4, 6):
        nf = int(rng.integers(1, cutoff - 1))
        config = TrapGasConfig(
            omega=1.0,
            n_fermions=nf,
            beta=float(rng.uniform(0.5, 3.0)),
            spin_degeneracy=1,
            cutoff=cutoff,
        )
        model = build_model(config, float(rng.uniform(0.1, 0.8)))
        thermal = solve_chemical_potential(config)
        exact = echo_exact(model, thermal, grid)
        oracle = echo_fock_oracle(model, config, grid)
        assert float(np.max(np.abs(exact.values - oracle.values))) < 1e-9


def test_fock_oracle_guards():
    config, model, thermal = make_setup(nf=2, v0=0.3, cutoff=5)
    grid = TimeGrid(t_max=1.0, n_steps=5)
    big_config, big_model, _ = make_setup(nf=2, v0=0.3, cutoff=13)
    with pytest.raises(ValueError):
        echo_fock_oracle(big_model, big_config, grid)
    spin_config = TrapGasConfig(omega=1.0, n_fermions=2, beta=2.0,
                                spin_degeneracy=2, cutoff=5)
    with pytest.raises(ValueError):
        echo_fock_oracle(model, spin_config, grid)
    mismatched = TrapGasConfig(omega=1.0, n_fermions=2, beta=2.0,
                               spin_degeneracy=1, cutoff=6)
    with pytest.raises(ValueError):
        echo_fock_oracle(model, mismatched, grid)
