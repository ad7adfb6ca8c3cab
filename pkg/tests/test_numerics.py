import numpy as np
import pytest
import scipy.linalg
import scipy.special
from hypothesis import given
from hypothesis import strategies as st

from dirac_reduce import Potential2x2, ScalarField
from dirac_reduce.errors import DimensionError, ParameterError
from dirac_reduce.models import PoschlTellerParams, pt_mode, pt_operator, pt_potential
from dirac_reduce.numerics import (Grid1D, Grid2D, GridTX, SampledSpinor, central_difference,
                                   convergence_order, discretize_1d, eigen_in_gap, observed_order,
                                   quadrature, residual_spacetime, residual_stationary)
from dirac_reduce.numerics.discretize import participation_ratio

D = np.sqrt(3.0) / 2.0


# -- grids and quadrature ---------------------------------------------------

def test_grid_validation():
    with pytest.raises(ParameterError):
        Grid1D(1.0, 0.0, 10)
    g = Grid1D.symmetric(2.0, 41)
    assert np.allclose(g.points[::10], [-2, -1, 0, 1, 2])
    assert g.spacing == pytest.approx(0.1)
    assert g.refined().n_points == 81


def test_quadrature_constant_and_sine():
    g = Grid1D(0.0, 1.0, 101)
    assert abs(quadrature(np.ones(101), g) - 1.0) < 1e-14
    g = Grid1D(0.0, np.pi, 2001)
    assert abs(quadrature(np.sin(g.points), g) - 2.0) < 1e-6


def test_quadrature_gaussian_tail_inside_box():
    g = Grid1D.symmetric(12.0, 2401)
    val = quadrature(np.exp(-g.points ** 2), g).real
    exact = np.sqrt(np.pi) * scipy.special.erf(12.0)
    assert abs(val - exact) < 1e-10


def test_quadrature_partial_axes():
    g = Grid2D(Grid1D(0, 1, 11, "x"), Grid1D(0, 2, 21, "y"))
    X, Y, _ = g.coords()
    over_x = quadrature(np.ones_like(X), g, over=["x"])
    assert over_x.shape == (21,)
    assert np.allclose(over_x, 1.0)
    assert abs(quadrature(X * Y, g) - 1.0) < 1e-12
    with pytest.raises(DimensionError):
        quadrature(np.ones(5), g)


def test_trapezoid_order_two():
    chain = [Grid1D(0.0, 1.0, n) for n in (11, 21, 41, 81)]
    res = convergence_order(lambda g: abs(quadrature(np.exp(g.points), g) - (np.e - 1.0)), chain)
    assert res.status == "ok" and abs(res.order - 2.0) < 0.2


def test_observed_order_floor():
    res = observed_order([0.1, 0.05, 0.025], [1e-16, 2e-16, 1e-16])
    assert res.status == "floor" and res.order is None
    with pytest.raises(ParameterError):
        observed_order([0.1, 0.05], [1.0, 0.25])


def test_central_difference_boundary_nan():
    g = Grid1D(0, 1, 11)
    d = central_difference(g.points[None, :] ** 2 + 0j, g.spacing, axis=1)
    assert np.isnan(d[0, 0]) and np.isnan(d[0, -1])
    assert np.allclose(d[0, 1:-1], 2 * g.points[1:-1])


# -- residuals --------------------------------------------------------------

def _plane_wave(grid, k, m, with_derivs=True):
    """Free massive plane wave of H = [[m, -i d_x], [-i d_x, -m]] with E > 0."""
    E = np.hypot(k, m)
    x = grid.points
    u = np.array([k, E - m], dtype=complex)
    comps = u[:, None] * np.exp(1j * k * x)[None, :]
    derivs = {"x": 1j * k * comps} if with_derivs else {}
    return SampledSpinor(grid, comps, derivs, "pi"), E


def test_residual_exact_plane_wave():
    g = Grid1D.symmetric(5.0, 201)
    psi, E = _plane_wave(g, 0.7, 0.4)
    V = Potential2x2(0.4, 0.0, -0.4)
    assert residual_stationary(V, psi, E) < 1e-14


@given(st.floats(0.0, 2 * np.pi), st.floats(0.1, 5.0))
def test_residual_invariant_under_phase_and_amplitude(alpha, amp):
    g = Grid1D.symmetric(5.0, 101)
    psi, E = _plane_wave(g, 0.7, 0.4)
    V = Potential2x2(0.4, 0.0, -0.4)
    r0 = residual_stationary(V, psi, E + 0.05)
    r1 = residual_stationary(V, psi.scaled(amp * np.exp(1j * alpha)), E + 0.05)
    assert abs(r0 - r1) < 1e-12 * max(1.0, r0)


def test_residual_numeric_derivative_order_two():
    def err(g):
        psi, E = _plane_wave(g, 0.9, 0.3, with_derivs=False)
        return residual_stationary(Potential2x2(0.3, 0.0, -0.3), psi, E)
    chain = [Grid1D.symmetric(4.0, n) for n in (41, 81, 161, 321)]
    res = convergence_order(err, chain)
    assert abs(res.order - 2.0) < 0.2


def test_residual_analytic_chain_reports_floor():
    chain = [Grid1D.symmetric(4.0, n) for n in (41, 81, 161)]
    res = convergence_order(lambda g: residual_stationary(
        Potential2x2(0.3, 0.0, -0.3), *_plane_wave(g, 0.9, 0.3)), chain)
    assert res.status == "floor"


def test_random_spinor_large_residual(rng):
    g = Grid1D.symmetric(10.0, 401)
    comps = rng.normal(size=(2, 401)) + 1j * rng.normal(size=(2, 401))
    psi = SampledSpinor(g, comps).normalized()
    assert residual_stationary(pt_potential(D), psi, 1.2) > 0.1


def test_rephased_state_residual_equals_phase_rate():
    tg = GridTX(Grid1D(-1.0, 1.0, 41, "t"), Grid1D.symmetric(5.0, 101))
    m, k = 0.4, 0.7
    E = np.hypot(k, m)
    X, _, T = tg.coords()
    u = np.array([k, E - m])[:, None, None]
    alpha = 0.3
    phase = np.exp(-1j * (E - alpha) * T + 1j * k * X)
    comps = u * phase[None]
    psi = SampledSpinor(tg, comps, {"t": -1j * (E - alpha) * comps, "x": 1j * k * comps}, "pi")
    r = residual_spacetime(Potential2x2(m, 0.0, -m), psi)
    assert abs(r - alpha) < 1e-12


def test_residual_shape_mismatch():
    g = Grid1D.symmetric(1.0, 11)
    with pytest.raises(DimensionError):
        SampledSpinor(g, np.zeros((2, 12)))
    psi = SampledSpinor(g, np.ones((2, 11)))
    with pytest.raises(ParameterError):
        residual_stationary(Potential2x2(0, 0, 0), psi, 0.0, convention="nope")


# -- discretization and eigensolves -----------------------------------------

@pytest.mark.parametrize("scheme", ["staggered", "central", "wilson"])
def test_operator_hermitian(scheme):
    op = pt_operator(PoschlTellerParams(D, 0.3, 1), Grid1D.symmetric(20.0, 400), scheme)
    assert op.hermiticity_defect() < 1e-12
    w = np.linalg.eigvals(op.dense())
    assert np.max(np.abs(w.imag)) < 1e-10


def test_free_spectrum_symmetric():
    op = discretize_1d(Potential2x2(0.0, 0.0, 0.0), Grid1D.symmetric(10.0, 200))
    w = np.linalg.eigvalsh(op.dense())
    assert np.allclose(np.sort(w), np.sort(-w), atol=1e-10)


def test_massive_gap():
    m = 0.5
    # box large enough that the lowest standing wave k = pi / L barely lifts the edge
    op = discretize_1d(Potential2x2(m, 0.0, -m), Grid1D.symmetric(100.0, 2000))
    mid = op.dim // 2
    lo, hi = scipy.linalg.eig_banded(op.banded_lower(), lower=True, eigvals_only=True,
                                     select="i", select_range=(mid - 1, mid))
    gap = hi - lo
    assert abs(gap - 2 * m) / (2 * m) < 1e-3
    assert len(eigen_in_gap(op, (-0.99 * m, 0.99 * m))) == 0


def test_pt_gap_states_and_overlap():
    grid = Grid1D.symmetric(60.0, 4000)
    op = pt_operator(PoschlTellerParams(D, 0.0, 1), grid)
    states = eigen_in_gap(op, (0.1, 1.7))
    assert len(states) == 2
    assert np.allclose(states.energies, [np.sqrt(5 / 3), np.sqrt(8 / 3)], atol=1e-3)
    up, _ = states.vectors[0]
    mode = pt_mode(PoschlTellerParams(D, 0.0, 1), grid)
    # the lower component sits half a cell to the right, so compare upper components
    ref = mode.components[0]
    overlap = abs(np.vdot(up / np.linalg.norm(up), ref / np.linalg.norm(ref)))
    assert overlap > 0.999


@pytest.mark.parametrize("scheme", ["staggered", "wilson"])
def test_banded_and_dense_agree(scheme):
    # staggered is tridiagonal (phase-rotated real solver), wilson goes through the general band driver
    op = pt_operator(PoschlTellerParams(D, 0.2, 1), Grid1D.symmetric(30.0, 1000), scheme)
    a = eigen_in_gap(op, (0.1, 1.5), method="banded")
    b = eigen_in_gap(op, (0.1, 1.5), method="dense")
    assert len(a) > 0 and np.allclose(a.energies, b.energies, atol=1e-10)
    assert a.n_filtered == b.n_filtered
    for (ua, la), (ub, lb) in zip(a.vectors, b.vectors):
        va, vb = np.concatenate([ua, la]), np.concatenate([ub, lb])
        assert abs(abs(np.vdot(va, vb)) - 1.0) < 1e-8


def test_staggered_has_no_doublers_central_does():
    grid = Grid1D.symmetric(25.0, 800)
    p = PoschlTellerParams(D, 0.0, 1)
    stag = eigen_in_gap(pt_operator(p, grid, "staggered"), (0.1, 1.7))
    cent = eigen_in_gap(pt_operator(p, grid, "central"), (0.1, 1.7))
    assert len(stag) == 2
    assert len(cent) > len(stag)


def test_refinement_is_cauchy():
    p = PoschlTellerParams(D, 0.0, 1)
    es = [eigen_in_gap(pt_operator(p, Grid1D.symmetric(40.0, n)), (0.1, 1.5)).energies[0]
          for n in (500, 1000, 2000)]
    assert abs(es[2] - es[1]) < abs(es[1] - es[0])


def test_box_doubling_changes_little():
    p = PoschlTellerParams(D, 0.0, 1)
    e1 = eigen_in_gap(pt_operator(p, Grid1D.symmetric(30.0, 2000)), (0.1, 1.5)).energies[0]
    e2 = eigen_in_gap(pt_operator(p, Grid1D.symmetric(60.0, 4000)), (0.1, 1.5)).energies[0]
    assert abs(e1 - e2) < 1e-6


def test_participation_ratio_limits():
    assert participation_ratio(np.ones(100)) == pytest.approx(100.0)
    v = np.zeros(100)
    v[3] = 1.0
    assert participation_ratio(v) == pytest.approx(1.0)


def test_bad_window_and_scheme():
    op = pt_operator(PoschlTellerParams(D, 0.0, 1), Grid1D.symmetric(10.0, 200))
    with pytest.raises(ParameterError):
        eigen_in_gap(op, (1.0, 0.5))
    with pytest.raises(ParameterError):
        discretize_1d(pt_potential(D), Grid1D.symmetric(10.0, 200), scheme="spectral")


def test_scalar_field_in_2d_residual():
    g = Grid2D(Grid1D.symmetric(3.0, 31, "x"), Grid1D.symmetric(3.0, 31, "y"))
    X, Y, _ = g.coords()
    kx, ky, m = 0.3, -0.5, 0.2
    E = np.sqrt(kx ** 2 + ky ** 2 + m ** 2)
    # pi = -i d_x - d_y acting on e^{i(kx x + ky y)} gives kx - i ky
    P = kx - 1j * ky
    u = np.array([P, E - m])[:, None, None]
    comps = u * np.exp(1j * (kx * X + ky * Y))[None]
    psi = SampledSpinor(g, comps, {"x": 1j * kx * comps, "y": 1j * ky * comps}, "pi")
    V = Potential2x2(ScalarField.constant(m), 0.0, -m)
    assert residual_stationary(V, psi, E) < 1e-14
