import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirac_reduce import ReductionParams, disorder_identify, lift
from dirac_reduce.errors import NotAdmissible, ParameterError, SchemeMismatch, ZeroEnergyMode
from dirac_reduce.models import (PoschlTellerParams, jacobi_exponents, pt_admissible,
                                 pt_band_structure, pt_disorder_pair, pt_disorder_potential,
                                 pt_energy, pt_mode, pt_printed_components, pt_potential,
                                 sigma_rho)
from dirac_reduce.numerics import Grid1D, residual_stationary
from dirac_reduce.numerics.residual import operator_residual

SQRT3_2 = np.sqrt(3.0) / 2.0

PT_PARAMS = ReductionParams(np.pi / 4, np.pi / 4, -1)


def _grid(delta=SQRT3_2, n=2001):
    return Grid1D.symmetric(30.0 * delta, n)


def test_energies_at_zero_momentum():
    assert abs(pt_energy(PoschlTellerParams(SQRT3_2, 0.0, 1)) - np.sqrt(5 / 3)) < 1e-14
    assert abs(pt_energy(PoschlTellerParams(SQRT3_2, 0.0, 2)) - np.sqrt(8 / 3)) < 1e-14
    assert pt_energy(PoschlTellerParams(SQRT3_2, 0.0, 0)) == 0.0
    assert pt_energy(PoschlTellerParams(SQRT3_2, 0.0, 1), sign=-1) < 0


@given(st.floats(0.6, 3.0), st.floats(0.0, 1.0), st.integers(1, 4))
def test_energy_even_in_momentum(delta, frac, n):
    k = frac * 2.0 * delta * 0.99
    a, b = PoschlTellerParams(delta, k, n), PoschlTellerParams(delta, -k, n)
    assert bool(pt_admissible(a)) == bool(pt_admissible(b))
    if pt_admissible(a):
        assert abs(pt_energy(a) - pt_energy(b)) < 1e-12


def test_admissibility_cases():
    # n = 4 delta^2 passes the range condition, but E_3 = 2 delta sits on the continuum edge
    edge = PoschlTellerParams(SQRT3_2, 0.0, 3)
    adm = pt_admissible(edge)
    assert not adm and adm.reason == "|k_y − 2δ| ≤ |E_n|"
    assert abs(pt_energy(edge, check=False) - np.sqrt(3.0)) < 1e-14
    adm = pt_admissible(PoschlTellerParams(SQRT3_2, 0.0, 4))
    assert not adm and adm.reason == "n > 4δ²"
    assert "2δ" in pt_admissible(PoschlTellerParams(SQRT3_2, 1.9, 1)).reason
    assert not pt_admissible(PoschlTellerParams(SQRT3_2, 0.2, 3))
    with pytest.raises(NotAdmissible):
        pt_energy(PoschlTellerParams(SQRT3_2, 0.0, 4))
    with pytest.raises(ParameterError):
        PoschlTellerParams(-1.0, 0.0, 1)
    with pytest.raises(ParameterError):
        PoschlTellerParams(1.0, 0.0, 1.5)


def test_strict_admissibility_is_tighter():
    p = PoschlTellerParams(SQRT3_2, 0.5, 2)
    assert pt_admissible(p)
    strict = pt_admissible(p, strict=True)
    assert not strict and "σ" in strict.reason
    assert "ρ" in pt_admissible(p.shifted(-1.0), strict=True).reason
    with pytest.raises(NotAdmissible):
        pt_mode(p, _grid())


@given(st.floats(0.7, 2.5), st.floats(-0.5, 0.5), st.integers(1, 6))
def test_exponent_magnitudes(delta, frac, n):
    p = PoschlTellerParams(delta, frac * delta, n)
    if not pt_admissible(p, strict=True):
        return
    sig, rho = jacobi_exponents(p)
    s2, r2 = sigma_rho(p)
    assert abs(sig - s2) < 1e-9 * max(1.0, sig) and abs(rho - r2) < 1e-9 * max(1.0, rho)


@pytest.mark.parametrize("n,k", [(1, 0.0), (2, 0.0), (1, 0.3), (2, 0.15), (1, -0.4)])
def test_mode_residual_and_normalization(n, k):
    p = PoschlTellerParams(SQRT3_2, k, n)
    psi = pt_mode(p, _grid())
    assert abs(psi.norm() - 1.0) < 1e-12
    e = pt_energy(p)
    assert residual_stationary(pt_potential(SQRT3_2), psi, e, k_y=k) < 1e-10
    neg = pt_mode(p, _grid(), sign=-1)
    assert residual_stationary(pt_potential(SQRT3_2), neg, -e, k_y=k) < 1e-10


def test_boundary_band_is_not_normalizable():
    from dirac_reduce.models.poschl_teller import pt_lower_component
    p = PoschlTellerParams(SQRT3_2, 0.0, 3)
    assert sigma_rho(p) == (0.0, 0.0)
    _, _, f, _, _ = pt_lower_component(p, np.array([-200.0, 200.0]), 0.0, 0.0)
    assert np.allclose(np.abs(f), 1.0)
    with pytest.raises(NotAdmissible):
        pt_mode(p, _grid())


def test_mode_zero_energy_raises():
    with pytest.raises(ZeroEnergyMode):
        pt_mode(PoschlTellerParams(SQRT3_2, 0.0, 0), _grid())


@pytest.mark.parametrize("n", [1, 2])
def test_density_parity_at_zero_momentum(n):
    rho = pt_mode(PoschlTellerParams(SQRT3_2, 0.0, n), _grid()).density()
    assert np.max(np.abs(rho - rho[::-1])) < 1e-12


def test_edge_decay_at_zero_momentum():
    g = _grid()
    psi = pt_mode(PoschlTellerParams(SQRT3_2, 0.0, 1), g)
    assert np.max(np.abs(psi.components[:, [0, -1]])) < 1e-8
    rho = psi.density()
    assert rho[len(rho) // 2] > 1e3 * rho[0]


def test_lifted_mode_solves_coupled_problem():
    V = pt_disorder_potential(SQRT3_2, 1 / np.sqrt(2), PT_PARAMS)[0]
    for n, k in ((1, 0.0), (2, 0.15)):
        p = PoschlTellerParams(SQRT3_2, k, n)
        Psi, _ = lift(pt_mode(p, _grid()), None, PT_PARAMS)
        r, mask = operator_residual(V, Psi, energy=pt_energy(p), epsilon=-1, k_y=k)
        assert np.sqrt(np.sum(np.abs(r[:, mask]) ** 2)) / Psi.norm() < 1e-10


@given(st.floats(0.6, 2.5))
def test_bands_inside_gap_and_even(delta):
    ks = np.linspace(-4 * delta, 4 * delta, 81)
    n_top = int(np.floor(4 * delta * delta + 1e-12))
    bands = pt_band_structure(delta, range(1, max(n_top, 1) + 1), ks)
    for n, k, e in bands:
        assert e < min(abs(k - 2 * delta), abs(k + 2 * delta)) + 1e-12
        assert abs(k) < 2 * delta
    zero = pt_band_structure(delta, [0], ks)
    assert np.all(zero["E"] == 0.0)


def test_disorder_components_match_closed_form():
    d1, d2 = SQRT3_2, 1 / np.sqrt(2)
    comps = disorder_identify(pt_disorder_pair(d1, d2, PT_PARAMS), "way1")
    printed = pt_printed_components(d1, d2, PT_PARAMS)
    g = np.linspace(-6, 6, 41)
    x, y = np.meshgrid(g, g, indexing="ij")
    for key, attr in (("V", "V"), ("V'", "V_prime"), ("W_A", "W_A"), ("W_B", "W_B")):
        assert np.max(np.abs(printed[key](x, y) - getattr(comps, attr)(x, y))) < 1e-13
    v_far = comps.V(np.array(50.0), np.array(50.0))
    assert abs(v_far - (-(np.sqrt(2) + 1j * np.sqrt(3)) / 2)) < 1e-12
    for attr in ("V", "V_prime", "W_A", "W_B"):
        assert abs(getattr(comps, attr)(np.array(0.0), np.array(0.0))) < 1e-15
    assert np.allclose(comps.W_B(x, y), -np.exp(-2j * PT_PARAMS.phi) * np.conj(comps.W_A(x, y)))


def test_disorder_requires_negative_epsilon():
    with pytest.raises(SchemeMismatch):
        pt_disorder_potential(SQRT3_2, 1 / np.sqrt(2), ReductionParams(np.pi / 4, np.pi / 4, 1))
