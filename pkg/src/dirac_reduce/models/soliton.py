"""Time-dependent breather-like mass and its localized states.

The first channel carries ``diag(a1, -a1)`` with
``a1 = m (-1 + 4 kappa^2 cosh^2(w t) / D(t, x))``. The reference closed-form
channel states solve ``-i d_t + i d_x sigma_1 - a1 sigma_3``, i.e. the
x-derivative and the mass both enter with the opposite sign. Since ``a1``
is even in ``x``, ``conj(psi(t, -x))`` solves the intended channel
``-i d_t - i d_x sigma_1 + a1 sigma_3``; those are the states used here.
:func:`soliton_printed_bispinors` keeps the reference form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import ScalarField
from ..errors import ParameterError
from ..numerics.spinor import SampledBispinor
from .spin_orbit import SpinOrbitFields, spin_orbit_assemble, spin_orbit_fields, spin_orbit_pair


@dataclass(frozen=True)
class SolitonParams:
    m: float
    omega: float

    def __post_init__(self):
        if not (np.isfinite(self.m) and np.isfinite(self.omega)):
            raise ParameterError("soliton parameters must be finite")
        if self.m == 0.0 and self.omega == 0.0:
            raise ParameterError("soliton needs (m, omega) != (0, 0)")
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def kappa(self):
        return float(np.hypot(self.m, self.omega))


def _D(p, x, t):
    m, w, k = p.m, p.omega, p.kappa
    return m * m + k * k * np.cosh(2.0 * w * t) + w * w * np.cosh(2.0 * k * x)


def _X(p, x, t):
    """``m kappa^2 cosh^2(w t) / D``, the building block of every field."""
    return p.m * p.kappa ** 2 * np.cosh(p.omega * t) ** 2 / _D(p, x, t)


def soliton_fields(p):
    """``{"a1", "d1", "D"}`` as fields of ``(x, t)``; ``d1 = -a1``."""
    a1 = ScalarField(lambda x, y, t: -p.m + 4.0 * _X(p, x, t), hermitian_entry=True, name="a1")
    D = ScalarField(lambda x, y, t: _D(p, x, t), hermitian_entry=True, name="D")
    return {"a1": a1, "d1": -a1, "D": D}


def soliton_d2(p, Delta):
    """Second-channel entry that makes ``Delta`` constant."""
    Delta = float(Delta)
    return ScalarField(lambda x, y, t: -(4.0 * Delta + 3.0 * p.m - 12.0 * _X(p, x, t)),
                       hermitian_entry=True, name="d2")


def soliton_mu_lambda(p, Delta):
    """``(Delta, mu, lambda)`` from the channel entries through the general relations."""
    f = soliton_fields(p)
    return spin_orbit_fields(f["a1"], f["d1"], soliton_d2(p, Delta))


def soliton_printed_mu_lambda(p, Delta):
    """``mu = -Delta - m + 4X`` and ``lambda = 2(Delta + m - 4X)`` with ``X = m kappa^2 cosh^2 / D``."""
    Delta = float(Delta)
    mu = ScalarField(lambda x, y, t: -Delta - p.m + 4.0 * _X(p, x, t), hermitian_entry=True)
    lam = ScalarField(lambda x, y, t: 2.0 * (Delta + p.m - 4.0 * _X(p, x, t)), hermitian_entry=True)
    return SpinOrbitFields(ScalarField.constant(Delta), mu, lam)


def soliton_pair(p, Delta, phi):
    f = soliton_fields(p)
    return spin_orbit_pair(f["a1"], f["d1"], soliton_d2(p, Delta), phi)


def soliton_potential(p, Delta, phi):
    f = soliton_fields(p)
    return spin_orbit_assemble(f["a1"], f["d1"], soliton_d2(p, Delta), phi)


def _numerators(p, x, t):
    """Channel numerators of both states with their x and t derivatives."""
    m, w, k = p.m, p.omega, p.kappa
    C, S = np.cosh(w * t), np.sinh(w * t)
    sh, ch = np.sinh(k * x), np.cosh(k * x)
    g = m * C + 1j * w * S
    h = -1j * m * C - w * S
    first = (
        (sh * g, k * ch * g, sh * (m * w * S + 1j * w * w * C)),
        (-1j * k * C * ch, -1j * k * k * C * sh, -1j * k * w * S * ch),
    )
    second = (
        (k * C * ch, k * k * C * sh, k * w * S * ch),
        (h * sh, k * h * ch, (-1j * m * w * S - w * w * C) * sh),
    )
    return first, second


def _channel(p, x, t, nums, sign_x):
    """Channel values ``N / D`` with their x and t derivatives."""
    D = _D(p, x, t)
    Dx = 2.0 * p.kappa * p.omega ** 2 * np.sinh(2.0 * p.kappa * x)
    Dt = 2.0 * p.omega * p.kappa ** 2 * np.sinh(2.0 * p.omega * t)
    vals, dxs, dts = [], [], []
    for N, Nx, Nt in nums:
        vals.append(N / D)
        dxs.append(sign_x * (Nx * D - N * Dx) / D ** 2)
        dts.append((Nt * D - N * Dt) / D ** 2)
    return np.stack(vals), np.stack(dxs), np.stack(dts)


def _lifted(c, phi):
    e = np.exp(1j * phi)
    return np.stack([c[0], c[1], e * c[1], e * c[0]])


def _states(p, phi, grid, adopted):
    X, _, T = grid.coords()
    xs = -X if adopted else X
    sign = -1.0 if adopted else 1.0
    conv = "pi" if adopted else "mirror_x"
    out = []
    for nums, label in zip(_numerators(p, xs, T), ("Psi_1", "Psi_2")):
        c, cx, ct = _channel(p, xs, T, nums, sign)
        if adopted:
            c, cx, ct = np.conj(c), np.conj(cx), np.conj(ct)
        out.append(SampledBispinor(grid, _lifted(c, phi),
                                   {"x": _lifted(cx, phi), "t": _lifted(ct, phi)}, conv, label))
    return tuple(out)


def soliton_bispinors(p, phi, grid):
    """``(Psi_1, Psi_2)`` over a :class:`GridTX`, solving the ``pi = -i d_x`` equation."""
    return _states(p, phi, grid, adopted=True)


def soliton_printed_bispinors(p, phi, grid):
    """The reference-form states; they solve the equation with ``pi = +i d_x`` and ``a1 -> -a1``."""
    return _states(p, phi, grid, adopted=False)
