"""Residual norms of Dirac equations for sampled spinors.

The equation is ``(-i d_t + K + V) psi = 0`` with a first-order kinetic
matrix ``K``. For the 2x2 problems ``K = [[0, P], [Q, 0]]`` where ``P`` and
``Q`` are fixed by a convention tag:

``"pi"``
    ``P = pi = -i d_x - d_y`` and ``Q = pi^dagger = -i d_x + d_y``.
``"pi_dagger"``
    the two placements exchanged.
``"mirror_x"``
    ``"pi"`` with ``d_x -> -d_x``.

The 4x4 kinetic term is ``blockdiag(K, eps * S K S)`` with ``S`` the 2x2
exchange, i.e. the second block carries ``eps * Q`` above the diagonal.
"""
import numpy as np

from .. import kernels
from ..algebra import Potential2x2, Potential4x4
from ..errors import DimensionError, ParameterError
from .grid import axis_index

CONVENTIONS = {
    "pi": {(0, 1): (-1j, -1.0), (1, 0): (-1j, 1.0)},
    "pi_dagger": {(0, 1): (-1j, 1.0), (1, 0): (-1j, -1.0)},
    "mirror_x": {(0, 1): (1j, -1.0), (1, 0): (1j, 1.0)},
}


def kinetic_terms(convention="pi", ncomp=2, epsilon=1):
    """``{(row, col): (coefficient of d_x, coefficient of d_y)}``."""
    try:
        base = CONVENTIONS[convention]
    except KeyError:
        raise ParameterError(f"unknown kinetic convention {convention!r}") from None
    if ncomp == 2:
        return dict(base)
    if ncomp != 4:
        raise DimensionError(f"kinetic term defined for 2 or 4 components, not {ncomp}")
    if epsilon not in (1, -1):
        raise ParameterError("epsilon must be +1 or -1")
    terms = dict(base)
    cx, cy = base[(1, 0)]
    terms[(2, 3)] = (epsilon * cx, epsilon * cy)
    cx, cy = base[(0, 1)]
    terms[(3, 2)] = (epsilon * cx, epsilon * cy)
    return terms


def central_difference(arr, h, axis):
    """Second-order central difference along ``axis``; boundary slices are NaN."""
    out = np.full(arr.shape, np.nan + 0j)
    lo = [slice(None)] * arr.ndim
    hi = [slice(None)] * arr.ndim
    mid = [slice(None)] * arr.ndim
    lo[axis], hi[axis], mid[axis] = slice(None, -2), slice(2, None), slice(1, -1)
    out[tuple(mid)] = (arr[tuple(hi)] - arr[tuple(lo)]) / (2.0 * h)
    return out


def _sample_potential(V, grid, ncomp):
    if isinstance(V, (Potential2x2, Potential4x4)):
        x, y, t = grid.coords()
        m = V.matrix(x, y, t)
    elif callable(V):
        x, y, t = grid.coords()
        m = np.asarray(V(x, y, t), dtype=complex)
    else:
        m = np.asarray(V, dtype=complex)
    if m.shape != tuple(grid.shape) + (ncomp, ncomp):
        raise DimensionError(f"potential samples of shape {m.shape} do not fit a "
                             f"{ncomp}-component spinor on grid {grid.shape}")
    return m


def _derivative(psi, name, k_y=None):
    """Derivative of every component along ``name`` and a validity mask."""
    if name in psi.derivs:
        return psi.derivs[name], None
    if name == "y" and k_y is not None:
        return 1j * k_y * psi.components, None
    k = axis_index(psi.grid, name)
    if k is None:
        return None, None
    d = central_difference(psi.components, psi.grid.axes[k].spacing, axis=k + 1)
    return d, np.isfinite(d[0])


def operator_residual(V, psi, energy=None, convention=None, epsilon=1, k_y=None):
    """Pointwise ``(-i d_t + K + V) psi`` (or ``(K + V - E) psi``) and its mask.

    Returns ``(r, mask)`` with ``r`` shaped like ``psi.components`` and
    ``mask`` marking points where every derivative used is defined.
    """
    ncomp = psi.ncomp
    convention = convention or psi.convention
    terms = kinetic_terms(convention, ncomp, epsilon)
    m = _sample_potential(V, psi.grid, ncomp)
    npts = int(np.prod(psi.grid.shape))
    flat_m = np.ascontiguousarray(m.reshape(npts, ncomp, ncomp))
    flat_v = np.ascontiguousarray(psi.components.reshape(ncomp, npts).T)
    r = kernels.apply_pointwise(flat_m, flat_v).T.reshape(psi.components.shape)
    mask = np.ones(psi.grid.shape, dtype=bool)

    dx, mx = _derivative(psi, "x")
    dy, my = _derivative(psi, "y", k_y)
    for mk in (mx, my):
        if mk is not None:
            mask &= mk
    for (i, j), (cx, cy) in terms.items():
        if dx is not None:
            r[i] = r[i] + cx * dx[j]
        if dy is not None:
            r[i] = r[i] + cy * dy[j]

    if energy is not None:
        r = r - energy * psi.components
    else:
        dt, mt = _derivative(psi, "t")
        if mt is not None:
            mask &= mt
        if dt is not None:
            r = r - 1j * dt
    return r, mask


def _relative_norm(r, psi, mask):
    num = np.sum(np.abs(r[:, mask]) ** 2)
    den = np.sum(np.abs(psi.components[:, mask]) ** 2)
    if den == 0.0:
        raise ParameterError("residual of a vanishing spinor is undefined")
    return float(np.sqrt(num / den))


def residual_stationary(V, psi, E, k_y=None, convention=None):
    """Relative residual ``||(H - E) psi|| / ||psi||`` of a 2x2 stationary problem.

    ``H = K + V`` with ``K`` from ``convention`` (default: the spinor's tag).
    The y-derivative is ``i k_y psi`` when ``k_y`` is given and the spinor
    carries no analytic y-derivative.
    """
    if psi.ncomp != 2:
        raise DimensionError("residual_stationary expects a 2-component spinor")
    r, mask = operator_residual(V, psi, energy=E, convention=convention, k_y=k_y)
    return _relative_norm(r, psi, mask)


def residual_spacetime(V, psi, convention=None, epsilon=1, k_y=None):
    """Relative residual of ``(-i d_t + K + V) psi = 0`` for 2- or 4-component states.

    ``epsilon`` selects the sign of the second kinetic block for 4x4 problems.
    """
    r, mask = operator_residual(V, psi, energy=None, convention=convention,
                                epsilon=epsilon, k_y=k_y)
    return _relative_norm(r, psi, mask)
