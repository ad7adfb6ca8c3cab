"""Crossed combs of scatterers: two orthogonal periodic barrier arrays.

Each reduced channel carries the diagonal potential ``-U`` with
``U = 4 m w^2 sin^2(kappa s) / D`` (``s = x`` for the first comb, ``y`` for
the second) and admits a localized state at energy ``m`` in the ``"pi"``
kinetic convention. The reference spatial profile is that eigenstate; its
reference time factor ``e^{+imt}`` belongs to energy ``-m`` under
``-i d_t``, so the stationary state here carries ``e^{-imt}``.
:func:`crossed_comb_printed` keeps the reference form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import Potential2x2, ReductionParams, ScalarField
from ..errors import ParameterError
from ..numerics.spinor import SampledSpinor
from ..reduction import ReducedPair, assemble, disorder_identify, lift

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class CrossedCombParams:
    m: float
    omega: float

    def __post_init__(self):
        if not (np.isfinite(self.m) and np.isfinite(self.omega)):
            raise ParameterError("crossed-comb parameters must be finite")
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def kappa(self):
        return float(np.hypot(self.m, self.omega))


def _check_axis(axis):
    if axis not in ("x", "y"):
        raise ParameterError(f"axis must be 'x' or 'y', got {axis!r}")


def comb_denominator(p, axis="x"):
    """``D_1(x, y)`` for ``axis="x"``; ``D_2`` (comb along y) for ``axis="y"``."""
    _check_axis(axis)
    m, w, k = p.m, p.omega, p.kappa
    if axis == "x":
        fn = lambda x, y, t: m * m + w * w * np.cos(2.0 * k * x) + k * k * np.cosh(2.0 * w * y)
    else:
        fn = lambda x, y, t: m * m + w * w * np.cos(2.0 * k * y) + k * k * np.cosh(2.0 * w * x)
    return ScalarField(fn, hermitian_entry=True, name=f"D_{axis}")


def comb_barrier(p, axis="x"):
    """``U = 4 m w^2 sin^2(kappa s) / D`` so that the channel potential is ``-U``."""
    D = comb_denominator(p, axis)
    m, w, k = p.m, p.omega, p.kappa
    if axis == "x":
        fn = lambda x, y, t: 4.0 * m * w * w * np.sin(k * x) ** 2 / D.fn(x, y, t)
    else:
        fn = lambda x, y, t: 4.0 * m * w * w * np.sin(k * y) ** 2 / D.fn(x, y, t)
    return ScalarField(fn, hermitian_entry=True, name=f"U_{axis}")


def crossed_comb_potential(p, axis="x"):
    _check_axis(axis)
    u = -comb_barrier(p, axis)
    return Potential2x2(u, 0.0, u)


def _printed_parts(p, x, y):
    """Reference-form numerators, prefactor and their x/y derivatives (no time factor)."""
    m, w, k = p.m, p.omega, p.kappa
    sx, cx = np.sin(k * x), np.cos(k * x)
    sh, ch = np.sinh(w * y), np.cosh(w * y)
    D = m * m + w * w * np.cos(2.0 * k * x) + k * k * np.cosh(2.0 * w * y)
    Dx = -2.0 * k * w * w * np.sin(2.0 * k * x)
    Dy = 2.0 * w * k * k * np.sinh(2.0 * w * y)
    pref = SQRT2 * k * k / D
    pref_x = -pref * Dx / D
    pref_y = -pref * Dy / D
    n1 = w * sx * sh - 1j * ch * (m * sx + k * cx)
    n2 = ch * (m * sx - k * cx) + 1j * w * sx * sh
    n1x = w * k * cx * sh - 1j * ch * (m * k * cx - k * k * sx)
    n1y = w * w * sx * ch - 1j * w * sh * (m * sx + k * cx)
    n2x = ch * (m * k * cx + k * k * sx) + 1j * w * k * cx * sh
    n2y = w * sh * (m * sx - k * cx) + 1j * w * w * sx * ch
    comps = np.stack([pref * n1, pref * n2])
    dx = np.stack([pref_x * n1 + pref * n1x, pref_x * n2 + pref * n2x])
    dy = np.stack([pref_y * n1 + pref * n1y, pref_y * n2 + pref * n2y])
    return comps, dx, dy


def crossed_comb_printed(p, x, y, t=0.0):
    """The reference-form localized state of the first comb, including ``e^{imt}``."""
    comps, _, _ = _printed_parts(p, np.asarray(x, float), np.asarray(y, float))
    return comps * np.exp(1j * p.m * np.asarray(t, float))


def crossed_comb_mode(p, grid, axis="x", normalize=True):
    """Localized state at energy ``m`` on a 2D grid, spatial part only.

    ``axis="x"`` gives the state of the first comb; ``axis="y"`` gives the
    companion of the second comb, ``xi(x, y) = exp(i pi sigma_3 / 4) psi(-y, x)``. Analytic x and y
    derivatives are attached; the time factor is ``e^{-imt}``.
    """
    _check_axis(axis)
    X, Y, _ = grid.coords()
    if axis == "x":
        comps, dx, dy = _printed_parts(p, X, Y)
    else:
        c, dxa, dya = _printed_parts(p, -Y, X)
        phase = np.exp(0.25j * np.pi * np.array([1.0, -1.0]))[:, None, None]
        comps = phase * c
        # d/dx acts on the second argument, d/dy on the first with a sign flip
        dx = phase * dya
        dy = -phase * dxa
    psi = SampledSpinor(grid, comps, {"x": dx, "y": dy}, "pi", f"crossed comb ({axis})")
    return psi.normalized() if normalize else psi


def crossed_comb_energy(p):
    return p.m


@dataclass(frozen=True)
class CrossedCombSystem:
    """The coupled crossed-comb problem under the second disorder identification."""

    pair: ReducedPair
    potential: object
    V_A: ScalarField
    W_plus: ScalarField
    W_minus: ScalarField

    @property
    def params(self):
        return self.pair.params


def crossed_comb_reducible(p1, p2, phi):
    """Assemble both combs with ``tau = pi/4``, ``epsilon = -1``.

    The assembled potential is canonical; ``V_A`` and ``W^+`` come from the
    named-component map and :func:`crossed_comb_printed_components` gives
    the reference expressions for comparison.
    """
    params = ReductionParams(np.pi / 4.0, phi, -1)
    pair = ReducedPair(crossed_comb_potential(p1, "x"), crossed_comb_potential(p2, "y"), params)
    comps = disorder_identify(pair, "way2")
    return CrossedCombSystem(pair, assemble(pair), comps.V_A, comps.W_plus, comps.W_minus)


def crossed_comb_printed_components(p1, p2, phi):
    """``V_A`` and ``W^+`` in their reference form (typographical slips included)."""
    k1, k2 = p1.kappa, p2.kappa
    D1 = comb_denominator(p1, "x").fn
    D2 = comb_denominator(p2, "y").fn

    def t1(x, y):
        return 2.0 * p1.m * p1.omega * np.sin(k1 * x) ** 2 / D1(x, y, 0.0)

    def t2(x, y):
        return 2.0 * p2.m * p2.omega * np.sin(k2 * x) ** 2 / D2(x, y, 0.0)

    V_A = ScalarField(lambda x, y, t: -t1(x, y) - t2(x, y), hermitian_entry=True)
    W = ScalarField(lambda x, y, t: -2.0 * np.exp(-1j * phi) * (t1(x, y) - t2(x, y)))
    return {"V_A": V_A, "W^+": W}


def crossed_comb_bispinors(p1, p2, phi, grid, normalize=True):
    """Lifted localized states ``(Psi, Xi)`` with energies ``(m1, m2)``."""
    params = ReductionParams(np.pi / 4.0, phi, -1)
    psi = crossed_comb_mode(p1, grid, "x", normalize)
    xi = crossed_comb_mode(p2, grid, "y", normalize)
    return lift(psi, xi, params)
