"""Spin-orbit / bilayer form of the reducible system and the tanh-mass scenario.

With ``a2 = a1``, ``b1 = b2 = 0``, ``tau = pi/4`` and ``epsilon = 1`` the
assembled potential has diagonal ``(mu + Delta, mu - Delta, mu - Delta, mu + Delta)``
and the coupling ``e^{-i phi} lambda`` between components 2 and 3.
``phi = pi/2`` gives the spin-orbit pattern, ``phi = 0`` the bilayer one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import Potential2x2, Potential4x4, ReductionParams, ScalarField, as_field
from ..errors import NotAdmissible
from ..numerics.spinor import SampledSpinor
from ..reduction import ReducedPair, lift
from .poschl_teller import PoschlTellerParams, pt_admissible, pt_energy, pt_mode


@dataclass(frozen=True)
class SpinOrbitFields:
    Delta: ScalarField
    mu: ScalarField
    lambda_: ScalarField


def spin_orbit_fields(a1, d1, d2):
    """``Delta = a1/2 - (d1 + d2)/4``, ``mu = a1/2 + (d1 + d2)/4``, ``lambda = (d1 - d2)/2``."""
    a1, d1, d2 = (as_field(f, hermitian_entry=True) for f in (a1, d1, d2))
    s = (d1 + d2) * 0.25
    return SpinOrbitFields(a1 * 0.5 - s, a1 * 0.5 + s, (d1 - d2) * 0.5)


def spin_orbit_params(phi):
    return ReductionParams(np.pi / 4.0, phi, 1)


def spin_orbit_pair(a1, d1, d2, phi):
    """Reduced pair ``(diag(a1, d1), diag(a1, d2))`` at the spin-orbit fixing."""
    return ReducedPair(Potential2x2(a1, 0.0, d1), Potential2x2(a1, 0.0, d2), spin_orbit_params(phi))


def spin_orbit_layout(fields, phi):
    """The 4x4 potential written in terms of ``(Delta, mu, lambda)``."""
    z = ScalarField.zero()
    D, mu, lam = fields.Delta, fields.mu, fields.lambda_
    plus, minus = mu + D, mu - D
    c = lam * np.exp(-1j * phi)
    return Potential4x4((
        plus, z, z, z,
        z, minus, c, z,
        z, c.conj(), minus, z,
        z, z, z, plus,
    ))


def spin_orbit_assemble(a1, d1, d2, phi):
    return spin_orbit_layout(spin_orbit_fields(a1, d1, d2), phi)


# --------------------------------------------------------------------------
# scenario with a tanh mass in both channels
# --------------------------------------------------------------------------

_U_INV = np.array([[1.0, -1j], [-1j, 1.0]]) / np.sqrt(2.0)  # exp(-i pi sigma_1 / 4)


@dataclass(frozen=True)
class Scenario2:
    pair: ReducedPair
    psi: SampledSpinor
    xi: SampledSpinor
    energies: tuple
    fields: SpinOrbitFields
    potential: Potential4x4

    def lifted(self):
        return lift(self.psi, self.xi, self.pair.params)


def scenario2_mass(delta, k_y):
    delta, k_y = float(delta), float(k_y)
    return ScalarField(lambda x, y, t: 2.0 * delta * np.tanh(x / (2.0 * delta)) + k_y,
                       hermitian_entry=True, name="tanh mass")


def _rotated_mode(p, grid, sign, channel):
    adm = pt_admissible(p, strict=True)
    if not adm:
        raise NotAdmissible(adm.reason, channel)
    mode = pt_mode(p, grid.x, sign=sign)
    energy = pt_energy(p, sign=sign, check=False)
    comps = np.tensordot(_U_INV, mode.components, axes=(1, 0))
    comps_x = np.tensordot(_U_INV, mode.derivs["x"], axes=(1, 0))
    return comps, comps_x, energy


def _on_tx(grid, comps, comps_x, energy):
    t = grid.t.points
    phase = np.exp(-1j * energy * t)[None, :, None]
    c = phase * comps[:, None, :]
    return c, {"t": -1j * energy * c, "x": phase * comps_x[:, None, :]}


def scenario2_model(delta, k_y, V2, n, grid, phi=np.pi / 2.0, sign=1):
    """Tanh-mass channels ``diag(M, -M)`` and ``diag(M, -M + 2 V2)``, ``M = 2 delta tanh + k_y``.

    ``grid`` is a :class:`GridTX`. ``psi`` is the rotated Poschl-Teller
    state with energy ``E_n(k_y)``; ``xi`` the one at ``k_y - V2`` with
    energy ``E_n(k_y - V2) + V2``. Both channels must be admissible.
    """
    V2 = float(V2)
    p_psi = PoschlTellerParams(delta, k_y, n)
    p_xi = PoschlTellerParams(delta, k_y - V2, n)
    c1, c1x, e1 = _rotated_mode(p_psi, grid, sign, "ψ")
    c2, c2x, e2 = _rotated_mode(p_xi, grid, sign, "ξ")
    e2 = e2 + V2
    comps, derivs = _on_tx(grid, c1, c1x, e1)
    psi = SampledSpinor(grid, comps, derivs, "pi", f"scenario2 psi n={n}")
    comps, derivs = _on_tx(grid, c2, c2x, e2)
    xi = SampledSpinor(grid, comps, derivs, "pi", f"scenario2 xi n={n}")

    M = scenario2_mass(delta, k_y)
    d2 = -M + 2.0 * V2
    pair = spin_orbit_pair(M, -M, d2, phi)
    fields = spin_orbit_fields(M, -M, d2)
    return Scenario2(pair, psi, xi, (e1, e2), fields, spin_orbit_layout(fields, phi))


def scenario2_printed_fields(delta, k_y, V2):
    """``Delta = k_y - V2/2 + 2 delta tanh(x / 2 delta)``, ``mu = V2/2``, ``lambda = -V2``."""
    delta, k_y, V2 = float(delta), float(k_y), float(V2)
    D = ScalarField(lambda x, y, t: k_y - 0.5 * V2 + 2.0 * delta * np.tanh(x / (2.0 * delta)),
                    hermitian_entry=True)
    return SpinOrbitFields(D, ScalarField.constant(0.5 * V2), ScalarField.constant(-V2))
