"""Dirac fermions in the Poschl-Teller (tanh-profile) off-diagonal potential.

The reduced problem at fixed transverse momentum ``k_y`` reads
``H = [[0, -i(d_x + W)], [-i(d_x - W), 0]]`` with ``W = k_y + 2 delta tanh(x / 2 delta)``,
which is the ``"pi"`` kinetic convention with off-diagonal entry
``b = -2i delta tanh(x / 2 delta)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import Potential2x2, ReductionParams, ScalarField
from ..errors import NotAdmissible, ParameterError, ZeroEnergyMode
from ..numerics.discretize import discretize_1d
from ..numerics.spinor import SampledSpinor
from ..reduction import ReducedPair, assemble, disorder_identify
from .special import jacobi_derivative, jacobi_polynomial

# slack for comparisons that hit equality exactly in exact arithmetic (n = 4 delta^2)
ROUND_TOL = 1e-12


@dataclass(frozen=True)
class PoschlTellerParams:
    delta: float
    k_y: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta <= 0.0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if not np.isfinite(self.k_y):
            raise ParameterError("k_y must be finite")
        if int(self.n) != self.n or self.n < 0:
            raise ParameterError(f"n must be a nonnegative integer, got {self.n}")
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "k_y", float(self.k_y))
        object.__setattr__(self, "n", int(self.n))

    @property
    def n_max(self):
        return 4.0 * self.delta ** 2

    def shifted(self, dk):
        return PoschlTellerParams(self.delta, self.k_y + dk, self.n)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def _energy_squared(p):
    d, k, n = p.delta, p.k_y, p.n
    denom = 4.0 * d * d - n
    if abs(denom) <= ROUND_TOL * max(1.0, 4.0 * d * d):
        if k != 0.0:
            return None
        ratio = 0.0
    else:
        ratio = 2.0 * d * k / denom
    return 2.0 * (n - n * n / (8.0 * d * d)) * (1.0 - ratio * ratio)


def pt_admissible(p, strict=False):
    """Check the square-integrability conditions and name the first violated one.

    The default checks the reference range conditions: ``n <= 4 delta^2``,
    ``|k_y| < 2 delta``, a real ``E_n``, ``|k_y - 2 delta| > |E_n|`` and
    ``|k_y + 2 delta| > |E_n|``. With ``strict=True`` the Jacobi exponents
    are additionally required to be the ones that make the closed-form mode
    an eigenfunction; those conditions are tighter at nonzero ``k_y``.
    """
    d, k, n = p.delta, p.k_y, p.n
    scale = max(1.0, 4.0 * d * d)
    if n > 4.0 * d * d + ROUND_TOL * scale:
        return Admissibility(False, "n > 4δ²")
    if abs(k) >= 2.0 * d:
        return Admissibility(False, "|k_y| ≥ 2δ")
    e2 = _energy_squared(p)
    if e2 is None:
        return Admissibility(False, "n = 4δ² with k_y ≠ 0 (energy formula singular)")
    if e2 < -ROUND_TOL * scale:
        return Admissibility(False, "E_n² < 0 (|2δ k_y| ≥ 4δ² − n)")
    e = np.sqrt(max(e2, 0.0))
    slack = ROUND_TOL * scale
    if not abs(k - 2.0 * d) > e + slack:
        return Admissibility(False, "|k_y − 2δ| ≤ |E_n|")
    if not abs(k + 2.0 * d) > e + slack:
        return Admissibility(False, "|k_y + 2δ| ≤ |E_n|")
    if strict:
        sig, rho = jacobi_exponents(p)
        if not sig > slack:
            return Admissibility(False, "σ branch: (4δ² − n)/2 − 4δ³k_y/(4δ² − n) ≤ 0")
        if not rho > slack:
            return Admissibility(False, "ρ branch: (4δ² − n)/2 + 4δ³k_y/(4δ² − n) ≤ 0")
    return Admissibility(True, "")


def jacobi_exponents(p):
    """Signed exponents ``(sigma, rho)`` for which the closed form solves the equation.

    Their magnitudes coincide with ``delta sqrt((k_y -+ 2 delta)^2 - E_n^2)``.
    """
    d, k, n = p.delta, p.k_y, p.n
    denom = 4.0 * d * d - n
    if abs(denom) <= ROUND_TOL * max(1.0, 4.0 * d * d):
        return 0.0, 0.0
    shift = 4.0 * d ** 3 * k / denom
    return 0.5 * denom - shift, 0.5 * denom + shift


def pt_energy(p, sign=1, check=True):
    """Closed-form band energy ``E_n(k_y)``; ``sign=-1`` gives the negative partner."""
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    if check:
        adm = pt_admissible(p)
        if not adm:
            raise NotAdmissible(adm.reason)
    e2 = _energy_squared(p)
    if e2 is None:
        raise NotAdmissible("n = 4δ² with k_y ≠ 0 (energy formula singular)")
    return sign * float(np.sqrt(max(e2, 0.0)))


def sigma_rho(p, energy=None):
    """``(sigma, rho)`` from the energy as in the closed-form mode."""
    e = pt_energy(p, check=False) if energy is None else energy
    d, k = p.delta, p.k_y
    return (d * np.sqrt(max((k - 2.0 * d) ** 2 - e * e, 0.0)),
            d * np.sqrt(max((k + 2.0 * d) ** 2 - e * e, 0.0)))


def pt_potential(delta, axis="x"):
    """Reduced potential of the first (``axis="x"``) or second (``"y"``) channel."""
    delta = float(delta)
    if axis == "x":
        b = ScalarField(lambda x, y, t: -2j * delta * np.tanh(x / (2.0 * delta)), name="pt_x")
    elif axis == "y":
        b = ScalarField(lambda x, y, t: -2.0 * delta * np.tanh(y / (2.0 * delta)), name="pt_y")
    else:
        raise ParameterError(f"axis must be 'x' or 'y', got {axis!r}")
    return Potential2x2(0.0, b, 0.0)


def pt_operator(p, grid, scheme="staggered"):
    """Finite-difference operator of the first channel at the transverse momentum of ``p``."""
    return discretize_1d(pt_potential(p.delta), grid, scheme=scheme, k_y=p.k_y, convention="pi")


def pt_lower_component(p, x, sigma=None, rho=None):
    """Lower component and its first two x-derivatives, evaluated in log space."""
    d, n = p.delta, p.n
    if sigma is None or rho is None:
        sigma, rho = sigma_rho(p)
    x = np.asarray(x, dtype=float)
    u = x / d
    log_e1 = -np.logaddexp(0.0, -u)  # log((1 + z)/2)
    log_e2 = -np.logaddexp(0.0, u)   # log((1 - z)/2)
    e1, e2 = np.exp(log_e1), np.exp(log_e2)
    z = np.tanh(x / (2.0 * d))
    zp = 2.0 * e1 * e2 / d
    zpp = -z * zp / d
    lp = ((sigma - rho) - (sigma + rho) * z) / (2.0 * d)
    lpp = -(sigma + rho) * zp / (2.0 * d)
    alpha, beta = 2.0 * rho, 2.0 * sigma
    P = jacobi_polynomial(n, alpha, beta, z)
    Pz = jacobi_derivative(n, alpha, beta, z, 1)
    Pzz = jacobi_derivative(n, alpha, beta, z, 2)
    w = np.exp(sigma * log_e1 + rho * log_e2)
    f = w * P
    fp = w * (lp * P + Pz * zp)
    fpp = w * ((lpp + lp * lp) * P + 2.0 * lp * Pz * zp + Pzz * zp * zp + Pz * zpp)
    return z, zp, f, fp, fpp


def pt_mode(p, grid, sign=1, normalize=True):
    """Closed-form bound state of the first channel on a 1D grid.

    Carries the analytic x-derivative; the ``e^{i(k_y y - E t)}`` factor is
    left implicit (pass ``k_y`` to the residual). Raises
    :class:`ZeroEnergyMode` for ``E_n = 0`` and :class:`NotAdmissible` when
    the closed form is not an eigenfunction.
    """
    adm = pt_admissible(p)
    if not adm:
        raise NotAdmissible(adm.reason)
    e = pt_energy(p, sign=sign, check=False)
    if e == 0.0:
        raise ZeroEnergyMode(f"E_{p.n} = 0: the closed-form upper component divides by the energy")
    adm = pt_admissible(p, strict=True)
    if not adm:
        raise NotAdmissible(adm.reason)
    sigma, rho = sigma_rho(p, e)
    x = grid.points
    z, zp, f, fp, fpp = pt_lower_component(p, x, sigma, rho)
    w = p.k_y + 2.0 * p.delta * z
    wp = 2.0 * p.delta * zp
    upper = (-1j / e) * (fp + w * f)
    upper_x = (-1j / e) * (fpp + wp * f + w * fp)
    comps = np.stack([upper, f.astype(complex)])
    derivs = {"x": np.stack([upper_x, fp.astype(complex)])}
    psi = SampledSpinor(grid, comps, derivs, "pi", f"pt n={p.n} k_y={p.k_y:g}")
    return psi.normalized() if normalize else psi


def pt_band_structure(delta, n_list, k_y_grid, strict=False):
    """Rows ``(n, k_y, E_n)`` at every admissible point, in input order.

    ``E_n >= 0``; the negative partners are ``-E_n``.
    """
    rows = []
    for n in n_list:
        for k in np.asarray(k_y_grid, dtype=float):
            p = PoschlTellerParams(delta, float(k), int(n))
            if pt_admissible(p, strict=strict):
                rows.append((p.n, p.k_y, pt_energy(p, check=False)))
    out = np.array(rows, dtype=[("n", int), ("k_y", float), ("E", float)])
    return out


def pt_disorder_pair(delta1, delta2, params):
    return ReducedPair(pt_potential(delta1, "x"), pt_potential(delta2, "y"), params)


def pt_disorder_potential(delta1, delta2, params):
    """Intervalley potential of the two Poschl-Teller channels under the first identification.

    Returns ``(potential, components)`` with ``potential = assemble(pair)``.
    """
    if not isinstance(params, ReductionParams):
        params = ReductionParams(*params)
    pair = pt_disorder_pair(delta1, delta2, params)
    comps = disorder_identify(pair, "way1")
    return assemble(pair), comps


def pt_printed_components(delta1, delta2, params):
    """The intervalley components written directly in terms of the tanh profiles."""
    c2, s2 = np.cos(params.tau) ** 2, np.sin(params.tau) ** 2
    sin2 = np.sin(2.0 * params.tau)
    em = np.exp(-1j * params.phi)

    def tx(x):
        return np.tanh(x / (2.0 * delta1))

    def ty(y):
        return np.tanh(y / (2.0 * delta2))

    V = ScalarField(lambda x, y, t: -2j * delta1 * c2 * tx(x) - 2.0 * delta2 * s2 * ty(y))
    Vp = ScalarField(lambda x, y, t: -2j * delta1 * s2 * tx(x) + 2.0 * delta2 * c2 * ty(y))
    W_A = ScalarField(lambda x, y, t: 1j * em * sin2 * (delta1 * tx(x) + 1j * delta2 * ty(y)))
    W_B = W_A.conj() * (-np.exp(-2j * params.phi))
    return {"V": V, "V'": Vp, "W_A": W_A, "W_B": W_B}
