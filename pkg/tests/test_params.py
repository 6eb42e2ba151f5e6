import math
from dataclasses import replace

import pytest

from MagnonFisher.errors import DomainError
from MagnonFisher.params import (
    HBAR,
    K_B,
    MaterialParams,
    SystemParams,
    bose_occupancy,
    coupling_from_geometry,
    drive_amplitude,
    kerr_coefficient,
    magnon_frequency,
    total_spin,
    two_pi_ghz,
    two_pi_mhz,
    two_pi_uhz,
)


def test_occupancy_zero_temperature():
    assert bose_occupancy(two_pi_ghz(10), 0.0) == 0.0


def test_occupancy_of_one():
    T = 1.0
    omega = math.log(2.0) * K_B * T / HBAR
    assert bose_occupancy(omega, T) == pytest.approx(1.0, rel=1e-12)


def test_occupancy_millikelvin_cavity():
    assert bose_occupancy(two_pi_ghz(10), 10e-3) == pytest.approx(1.4e-21, rel=0.05)


def test_occupancy_deep_quantum_limit_is_zero():
    assert bose_occupancy(two_pi_ghz(10), 1e-6) == 0.0


def test_occupancy_monotonic_in_temperature():
    values = [bose_occupancy(two_pi_ghz(10), T) for T in (0.05, 0.1, 0.2, 0.5, 1.0)]
    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("omega, T", [(0.0, 0.1), (-1.0, 0.1), (two_pi_ghz(10), -0.1)])
def test_occupancy_domain(omega, T):
    with pytest.raises(DomainError):
        bose_occupancy(omega, T)


def test_drive_amplitude_baseline():
    E = drive_amplitude(0.5, two_pi_ghz(10), two_pi_mhz(5))
    assert E == pytest.approx(1.54e15, rel=1e-2)


def test_drive_amplitude_zero_power():
    assert drive_amplitude(0.0, two_pi_ghz(10), two_pi_mhz(5)) == 0.0


def test_drive_amplitude_scales_with_square_root_of_power():
    base = drive_amplitude(1e-6, two_pi_ghz(10), two_pi_mhz(5))
    assert drive_amplitude(4e-6, two_pi_ghz(10), two_pi_mhz(5)) / base == pytest.approx(2.0, rel=1e-14)
    for k in range(1, 13):
        scaled = drive_amplitude(1e-6 * 10**k, two_pi_ghz(10), two_pi_mhz(5))
        assert scaled / base == pytest.approx(10 ** (k / 2), rel=1e-12)


def test_drive_amplitude_domain():
    with pytest.raises(DomainError):
        drive_amplitude(-1.0, two_pi_ghz(10), two_pi_mhz(5))
    with pytest.raises(DomainError):
        drive_amplitude(1.0, 0.0, two_pi_mhz(5))


def test_total_spin_yig_sphere():
    assert total_spin(250e-6, 4.22e27) == pytest.approx(1.75e17, rel=0.015)


def test_total_spin_scaling():
    assert total_spin(500e-6, 4.22e27) / total_spin(250e-6, 4.22e27) == pytest.approx(8.0, rel=1e-12)
    assert total_spin(250e-6, 0.0) == 0.0


def test_total_spin_domain():
    with pytest.raises(DomainError):
        total_spin(0.0, 4.22e27)


def test_material_yig_reproduces_kerr():
    assert kerr_coefficient(MaterialParams.yig()) == pytest.approx(two_pi_uhz(2), rel=1e-12)


def test_kerr_inverse_in_volume():
    mat = MaterialParams.yig()
    doubled = replace(mat, V_m=2 * mat.V_m)
    assert kerr_coefficient(doubled) == pytest.approx(kerr_coefficient(mat) / 2, rel=1e-12)


def test_kerr_vanishes_without_anisotropy():
    assert kerr_coefficient(replace(MaterialParams.yig(), K_an=0.0)) == 0.0


def test_magnon_frequency_without_bias_is_negative():
    assert magnon_frequency(replace(MaterialParams.yig(), H_B=0.0)) < 0


def test_magnon_frequency_without_kerr_is_larmor():
    mat = replace(MaterialParams.yig(), K_an=0.0)
    assert magnon_frequency(mat) == pytest.approx(mat.gamma_e * mat.H_B, rel=1e-15)


def test_coupling_halves_with_quadrupled_cavity_volume():
    mat = MaterialParams.yig()
    g = coupling_from_geometry(mat, two_pi_ghz(10))
    g4 = coupling_from_geometry(replace(mat, V_a=4 * mat.V_a), two_pi_ghz(10))
    assert g4 == pytest.approx(g / 2, rel=1e-12)


@pytest.mark.parametrize("name", ["gamma_e", "mu0", "M_b", "V_m", "V_a", "rho"])
def test_material_rejects_non_positive(name):
    with pytest.raises(DomainError):
        replace(MaterialParams.yig(), **{name: 0.0})


def test_baseline_values(baseline):
    assert baseline.delta_a1 == two_pi_mhz(40)
    assert baseline.J == two_pi_mhz(26)
    assert baseline.g == two_pi_mhz(41)
    assert baseline.symmetric_cavities
    assert baseline.omega_a1 == baseline.omega_l + baseline.delta_a1


@pytest.mark.parametrize(
    "overrides",
    [{"gamma_m": 0.0}, {"gamma_a1": -1.0}, {"T": -1e-3}, {"P_l": -0.1}, {"J": -1.0}],
)
def test_system_params_domain(overrides):
    with pytest.raises(DomainError):
        SystemParams.baseline(**overrides)


def test_with_overrides_shorthands(baseline):
    params = baseline.with_overrides(gamma_a=two_pi_mhz(7), delta_a=two_pi_mhz(50))
    assert params.gamma_a1 == params.gamma_a2 == two_pi_mhz(7)
    assert params.delta_a1 == params.delta_a2 == two_pi_mhz(50)
    assert params.omega_a2 == params.omega_l + two_pi_mhz(50)


def test_with_overrides_unknown_key(baseline):
    with pytest.raises(DomainError):
        baseline.with_overrides(flux=1.0)


def test_inconsistent_absolute_frequency_is_warned(caplog):
    with caplog.at_level("WARNING"):
        SystemParams.baseline(omega_a1=two_pi_ghz(11))
    assert "omega_a1" in caplog.text


def test_occupancies_at_baseline_are_negligible(baseline):
    assert all(n < 1e-15 for n in baseline.occupancies())


def test_drive_from_params(baseline):
    assert baseline.E_l == drive_amplitude(baseline.P_l, baseline.omega_l, baseline.gamma_a2)


def test_from_material_is_consistent():
    # the Kerr shift K·2S must stay below the bias term for ω_m > 0
    mat = MaterialParams.yig(K=two_pi_uhz(2e-4))
    params = SystemParams.from_material(
        mat,
        omega_l=two_pi_ghz(10),
        delta_a1=two_pi_mhz(40),
        delta_a2=two_pi_mhz(40),
        gamma_a1=two_pi_mhz(5),
        gamma_a2=two_pi_mhz(5),
        gamma_m=two_pi_mhz(40),
        J=two_pi_mhz(26),
        P_l=0.5,
        T=10e-3,
    )
    assert params.K == pytest.approx(kerr_coefficient(mat), rel=1e-15)
    assert params.omega_m == pytest.approx(magnon_frequency(mat), rel=1e-15)
    assert params.delta_m == pytest.approx(params.omega_m - params.omega_l, rel=1e-12)
    assert params.g == pytest.approx(coupling_from_geometry(mat, params.omega_a2), rel=1e-15)


def test_coupling_of_yig_sphere():
    assert coupling_from_geometry(MaterialParams.yig(), two_pi_ghz(10.04)) == pytest.approx(two_pi_mhz(16.8), rel=0.01)
