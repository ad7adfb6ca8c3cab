"""Assembly, detection and lifting for reducible 4x4 Dirac potentials.

A pair of 2x2 Dirac problems with potentials ``V1``, ``V2`` is mapped to a
single coupled 4x4 problem by the constant unitary ``T = R (U x I2)`` of
:func:`dirac_reduce.algebra.total_transform`. :func:`assemble` writes the
coupled potential entry by entry; :func:`detect` inverts the map from
samples; :func:`lift` carries 2-spinor solutions to 4-spinor solutions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import (HERMITIAN_TOL, Potential2x2, Potential4x4, ReductionParams, ScalarField,
                      as_field, blockdiag, total_transform)
from .errors import (DegenerateAngleError, DimensionError, NotReducible, ParameterError,
                     SchemeMismatch, UnderdeterminedAngle)
from .numerics.quadrature import quadrature
from .numerics.spinor import SampledBispinor, SampledSpinor

TOL_DETECT = 1e-8
TOL_DEGENERATE = 1e-6
TOL_SCHEME = 1e-10
_ANGLE_EPS = 1e-12


@dataclass(frozen=True)
class ReducedPair:
    first: Potential2x2
    second: Potential2x2
    params: ReductionParams


@dataclass(frozen=True)
class PerturbationBlock:
    """Entries of the 2x2 block ``[[v1, v2], [v3, v4]]`` placed above the diagonal."""

    v1: ScalarField
    v2: ScalarField
    v3: ScalarField
    v4: ScalarField

    def __post_init__(self):
        for name in ("v1", "v2", "v3", "v4"):
            object.__setattr__(self, name, as_field(getattr(self, name)))

    def full(self):
        """The 4x4 perturbation before the unitary mapping, as an entry grid."""
        z = ScalarField.zero()
        v1, v2, v3, v4 = self.v1, self.v2, self.v3, self.v4
        return Potential4x4((
            z, z, v1, v2,
            z, z, v3, v4,
            v1.conj(), v3.conj(), z, z,
            v2.conj(), v4.conj(), z, z,
        ))


@dataclass(frozen=True)
class FixedFormComponents:
    """The six free entries of a reducible potential in fixed form.

    ``V11, V22, V14, V23`` are real; ``V12, V13`` complex.
    """

    V11: ScalarField
    V12: ScalarField
    V13: ScalarField
    V14: ScalarField
    V22: ScalarField
    V23: ScalarField

    def __post_init__(self):
        for name in ("V11", "V14", "V22", "V23"):
            object.__setattr__(self, name, as_field(getattr(self, name), hermitian_entry=True))
        for name in ("V12", "V13"):
            object.__setattr__(self, name, as_field(getattr(self, name)))


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------


def assemble(pair):
    """Coupled 4x4 potential of a reduced pair, entry by entry.

    Equal to ``T blockdiag(V1, V2) T^dagger`` with ``T = total_transform``;
    :func:`conjugation_oracle` evaluates that product independently.
    """
    p = pair.params
    a1, b1, d1 = pair.first.a, pair.first.b, pair.first.d
    a2, b2, d2 = pair.second.a, pair.second.b, pair.second.d
    c2 = np.cos(p.tau) ** 2
    s2 = np.sin(p.tau) ** 2
    half = 0.5 * np.sin(2.0 * p.tau)
    em = np.exp(-1j * p.phi)
    ep = np.exp(1j * p.phi)
    eps = p.epsilon

    da, db, dd = a1 - a2, b1 - b2, d1 - d2
    mixed_b = b2 * c2 + b1 * s2
    v00 = a1 * c2 + a2 * s2
    v01 = b1 * c2 + b2 * s2
    v02 = db * (eps * em * half)
    v03 = da * (em * half)
    v11 = d1 * c2 + d2 * s2
    v12 = dd * (eps * em * half)
    v13 = db.conj() * (em * half)
    v22 = d1 * s2 + d2 * c2
    v23 = mixed_b.conj() * eps
    v33 = a1 * s2 + a2 * c2
    return Potential4x4((
        v00, v01, v02, v03,
        v01.conj(), v11, v12, v13,
        v02.conj(), v12.conj(), v22, v23,
        v03.conj(), v13.conj(), v23.conj(), v33,
    ))


def conjugation_oracle(pair, x, y=0.0, t=0.0):
    """Samples of ``T blockdiag(V1, V2) T^dagger`` via pointwise matrix products."""
    m = blockdiag(pair.first.matrix(x, y, t), pair.second.matrix(x, y, t))
    shape = m.shape[:-2]
    flat = np.ascontiguousarray(m.reshape(-1, 4, 4))
    out = kernels.conjugate_pointwise(total_transform(pair.params), flat)
    return out.reshape(shape + (4, 4))


def conjugate_fields(T, potential):
    """Entry fields of ``T M T^dagger`` for a constant matrix ``T``."""
    T = np.asarray(T, dtype=complex)
    out = []
    for i in range(4):
        for j in range(4):
            acc = None
            for k in range(4):
                for l in range(4):
                    coef = T[i, k] * np.conj(T[j, l])
                    if abs(coef) < 1e-15:
                        continue
                    term = potential.entry(k, l) * coef
                    acc = term if acc is None else acc + term
            out.append(acc if acc is not None else ScalarField.zero())
    return Potential4x4(tuple(out))


# --------------------------------------------------------------------------
# fixed form and its reduced pair
# --------------------------------------------------------------------------


def fixed_form_potential(c, params):
    """The 4x4 potential with free entries ``c`` and the four dependent ones."""
    eps = params.epsilon
    em = np.exp(-1j * params.phi)
    ep = np.exp(1j * params.phi)
    cot2 = _cot(2.0 * params.tau)
    v12c, v13c = c.V12.conj(), c.V13.conj()
    v34 = v12c * eps - v13c * (2.0 * cot2)
    v44 = c.V11 - c.V14 * (2.0 * cot2)
    v33 = c.V22 - c.V23 * (2.0 * eps * cot2)
    return Potential4x4((
        c.V11, c.V12, c.V13 * em, c.V14 * em,
        v12c, c.V22, c.V23 * em, v13c * (eps * em),
        v13c * ep, c.V23 * ep, v33, v34,
        c.V14 * ep, c.V13 * (eps * ep), v34.conj(), v44,
    ))


def _cot(angle):
    s = np.sin(angle)
    if abs(s) < _ANGLE_EPS:
        raise DegenerateAngleError(f"cot({angle}) is singular")
    return np.cos(angle) / s


def _probe_points():
    g = np.linspace(-5.0, 5.0, 9)
    x, y = np.meshgrid(g, g, indexing="ij")
    x = np.concatenate([x.ravel(), x.ravel()])
    y = np.concatenate([y.ravel(), y.ravel()])
    t = np.concatenate([np.zeros(81), np.ones(81)])
    return x, y, t


def reduced_pair_from_fixed_form(c, params, points=None):
    """Reduced potentials ``base + eps tan(tau) corr`` and ``base - eps cot(tau) corr``.

    ``base = [[V11, V12], [V12^dagger, V22]]`` and
    ``corr = [[eps V14, V13], [V13^dagger, V23]]``. At ``tau`` a multiple of
    pi/2 the correction must vanish (checked on ``points``), otherwise
    :class:`DegenerateAngleError` is raised.
    """
    eps = params.epsilon
    s, co = np.sin(params.tau), np.cos(params.tau)
    base = Potential2x2(c.V11, c.V12, c.V22)
    corr = Potential2x2(c.V14 * eps, c.V13, c.V23)
    if abs(s) < _ANGLE_EPS or abs(co) < _ANGLE_EPS:
        x, y, t = points if points is not None else _probe_points()
        if np.max(np.abs(corr.matrix(x, y, t)), initial=0.0) > 0.0:
            raise DegenerateAngleError(
                f"tau={params.tau} makes tan or cot singular while the auxiliary term is nonzero")
        return ReducedPair(base, base, params)
    first = base + corr.scaled(eps * s / co)
    second = base + corr.scaled(-eps * co / s)
    return ReducedPair(first, second, params)


# --------------------------------------------------------------------------
# detection
# --------------------------------------------------------------------------


@dataclass
class DetectionResult:
    """Recovered parameters, sampled reduced potentials and diagnostics."""

    params: ReductionParams
    first: np.ndarray
    second: np.ndarray
    max_violation: float
    phase_spread: float
    cot_2tau: float


CONSTRAINTS = ("Im V14", "Im V23", "V24", "V33", "V44", "V43")


def detect_samples(M, epsilon, tol=TOL_DETECT, tol_degenerate=TOL_DEGENERATE):
    """Recover ``(tau, phi)`` and the reduced pair from samples ``M`` of shape ``(P, 4, 4)``.

    Only one representative of each equivalence class is returned: the pair
    ``(tau, phi, V1, V2)`` and ``(pi/2 - tau, phi + pi, V2, V1)`` produce the
    same coupled potential, and the detector reports the one with
    ``phi`` in ``[0, pi)``; ``tau`` always lies in ``(0, pi/2)``.

    Tolerances are relative to the largest entry at each sample point
    (floored at ``1e-8`` of the global largest entry so exact zeros of the
    potential do not demand exact arithmetic).
    """
    if epsilon not in (1, -1):
        raise ParameterError("epsilon must be +1 or -1")
    M = np.asarray(M, dtype=complex).reshape(-1, 4, 4)
    if M.shape[0] == 0:
        raise ParameterError("detect needs at least one sample point")
    scale = np.max(np.abs(M), axis=(1, 2))
    glob = float(np.max(scale))
    herm = np.max(np.abs(M - np.conj(np.swapaxes(M, 1, 2))))
    if herm > HERMITIAN_TOL * max(glob, 1.0):
        raise ParameterError(f"potential is not Hermitian (defect {herm:.3e})")
    floor = 1e-8 * glob
    point_tol = tol * np.maximum(scale, floor)

    cross = M[:, :2, 2:]
    if glob == 0.0 or np.max(np.abs(cross)) <= tol * glob:
        raise UnderdeterminedAngle("cross blocks vanish: the mixing angle is not identifiable")

    # every term below equals e^{-2i phi} times a nonnegative number when reducible
    z = epsilon * M[:, 0, 2] * M[:, 1, 3] + M[:, 0, 3] ** 2 + M[:, 1, 2] ** 2
    Z = z.sum()
    if abs(Z) == 0.0:
        raise NotReducible("phase estimates cancel: no common phi", {"constraint": "phase"})
    phi = float(np.mod(-np.angle(Z) / 2.0, np.pi))
    strong = np.abs(z) > tol * np.max(np.abs(z))
    spread = float(np.max(np.abs(np.angle(z[strong] * np.exp(2j * phi)))) / 2.0)

    e = np.exp(1j * phi)
    v13 = e * M[:, 0, 2]
    v14c = e * M[:, 0, 3]
    v23c = e * M[:, 1, 2]
    v14, v23 = v14c.real, v23c.real
    nums = (M[:, 0, 0] - M[:, 3, 3], M[:, 1, 1] - M[:, 2, 2], epsilon * M[:, 0, 1] - M[:, 3, 2])
    dens = (2.0 * v14, 2.0 * epsilon * v23, 2.0 * v13)
    den2 = sum(np.sum(np.abs(d) ** 2) for d in dens)
    if den2 <= (tol * glob) ** 2:
        raise NotReducible("cross blocks do not follow the reducible pattern",
                           {"constraint": "V24", "magnitude": float(np.max(np.abs(M[:, 1, 3])))})
    cot = float(sum(np.sum(np.real(np.conj(d) * n)) for n, d in zip(nums, dens)) / den2)
    tau = 0.5 * float(np.arctan2(1.0, cot))
    if abs(np.sin(2.0 * tau)) < tol_degenerate:
        raise UnderdeterminedAngle(f"|sin 2 tau| = {abs(np.sin(2 * tau)):.2e} below the degenerate threshold")

    viol = np.stack([
        np.abs(v14c.imag),
        np.abs(v23c.imag),
        np.abs(M[:, 1, 3] - epsilon * np.conj(e) * np.conj(v13)),
        np.abs(M[:, 2, 2] - (M[:, 1, 1].real - 2.0 * epsilon * v23 * cot)),
        np.abs(M[:, 3, 3] - (M[:, 0, 0].real - 2.0 * v14 * cot)),
        np.abs(M[:, 3, 2] - (epsilon * M[:, 0, 1] - 2.0 * v13 * cot)),
    ])
    rel = viol / point_tol
    worst = np.unravel_index(int(np.argmax(rel)), rel.shape)
    max_violation = float(viol[worst])
    if rel[worst] > 1.0:
        report = {
            "constraint": CONSTRAINTS[worst[0]],
            "point": int(worst[1]),
            "magnitude": max_violation,
            "threshold": float(point_tol[worst[1]]),
            "violating_points": int(np.count_nonzero(np.any(rel > 1.0, axis=0))),
            "tau": tau,
            "phi": phi,
            "phase_spread": spread,
        }
        raise NotReducible(
            f"constraint {CONSTRAINTS[worst[0]]} violated by {max_violation:.3e} at sample "
            f"point {worst[1]}", report)

    tn = np.tan(tau)
    ct = 1.0 / tn
    v11, v22, v12 = M[:, 0, 0].real, M[:, 1, 1].real, M[:, 0, 1]
    first = np.empty((M.shape[0], 2, 2), dtype=complex)
    second = np.empty_like(first)
    for out, f in ((first, epsilon * tn), (second, -epsilon * ct)):
        out[:, 0, 0] = v11 + f * epsilon * v14
        out[:, 0, 1] = v12 + f * v13
        out[:, 1, 0] = np.conj(out[:, 0, 1])
        out[:, 1, 1] = v22 + f * v23
    params = ReductionParams(tau, phi, epsilon)
    return DetectionResult(params, first, second, max_violation, spread, cot)


def _points(sample_points):
    if hasattr(sample_points, "coords"):
        return sample_points.coords()
    pts = tuple(np.asarray(p, dtype=float) for p in sample_points)
    while len(pts) < 3:
        pts = pts + (np.zeros_like(pts[0]),)
    return pts


def detect(V, epsilon, sample_points, tol=TOL_DETECT, tol_degenerate=TOL_DEGENERATE):
    """Decide reducibility of a 4x4 potential field.

    ``sample_points`` is a grid or an ``(x, y[, t])`` tuple of arrays. On
    success returns ``(params, pair)`` where the reduced potentials are
    fields built from the entries of ``V``. Raises
    :class:`UnderdeterminedAngle` or :class:`NotReducible` otherwise.
    """
    x, y, t = _points(sample_points)
    if np.size(x) == 0:
        raise ParameterError("detect needs at least one sample point")
    res = detect_samples(V.matrix(x, y, t), epsilon, tol, tol_degenerate)
    p = res.params
    e = np.exp(1j * p.phi)
    comps = FixedFormComponents(
        V11=V.entry(0, 0).real(),
        V12=V.entry(0, 1),
        V13=V.entry(0, 2) * e,
        V14=(V.entry(0, 3) * e).real(),
        V22=V.entry(1, 1).real(),
        V23=(V.entry(1, 2) * e).real(),
    )
    return p, reduced_pair_from_fixed_form(comps, p)


def canonical_branch(params, first=None, second=None):
    """Representative with ``phi`` in ``[0, pi)`` of the detector's equivalence class."""
    phi = float(np.mod(params.phi, 2.0 * np.pi))
    if phi < np.pi:
        return ReductionParams(params.tau, phi, params.epsilon), first, second
    return ReductionParams(np.pi / 2.0 - params.tau, phi - np.pi, params.epsilon), second, first


# --------------------------------------------------------------------------
# lifting and perturbations
# --------------------------------------------------------------------------


def lift_matrices(params):
    """The 4x2 maps ``psi -> Psi`` and ``xi -> Xi`` of the two channels."""
    c, s = np.cos(params.tau), np.sin(params.tau)
    e = np.exp(1j * params.phi)
    eps = params.epsilon
    lp = np.array([[c, 0], [0, c], [0, eps * e * s], [e * s, 0]], dtype=complex)
    lx = np.array([[-s, 0], [0, -s], [0, eps * e * c], [e * c, 0]], dtype=complex)
    return lp, lx


def _apply_lift(L, spinor):
    if spinor.ncomp != 2:
        raise DimensionError("lift expects 2-component spinors")
    comps = np.tensordot(L, spinor.components, axes=(1, 0))
    derivs = {k: np.tensordot(L, v, axes=(1, 0)) for k, v in spinor.derivs.items()}
    return SampledBispinor(spinor.grid, comps, derivs, spinor.convention, spinor.label)


def lift(psi, xi, params):
    """Bispinors of the coupled problem from solutions of the two reduced ones.

    Either argument may be ``None``; the corresponding output is then ``None``.
    Analytic derivatives travel with the states.
    """
    lp, lx = lift_matrices(params)
    return (None if psi is None else _apply_lift(lp, psi),
            None if xi is None else _apply_lift(lx, xi))


def perturbation_lift(block, params):
    """``T dV T^dagger`` for the off-diagonal perturbation built from ``block``."""
    return conjugate_fields(total_transform(params), block.full())


def expectation(Psi, M, grid=None):
    """Quadrature of ``Psi^dagger M Psi`` over the whole grid."""
    grid = grid if grid is not None else Psi.grid
    if tuple(grid.shape) != Psi.components.shape[1:]:
        raise DimensionError(f"spinor samples {Psi.components.shape[1:]} do not match grid {grid.shape}")
    if Psi.ncomp != 4:
        raise DimensionError("expectation expects a 4-component spinor")
    x, y, t = grid.coords()
    m = M.matrix(x, y, t) if isinstance(M, Potential4x4) else np.asarray(M, dtype=complex)
    if m.shape[-2:] != (4, 4):
        raise DimensionError("expectation expects a 4x4 potential")
    m = np.broadcast_to(m, tuple(grid.shape) + (4, 4))
    psi = np.moveaxis(Psi.components, 0, -1)
    integrand = np.einsum("...i,...ij,...j->...", np.conj(psi), m, psi)
    return quadrature(integrand, grid)


# --------------------------------------------------------------------------
# disorder identifications
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DisorderComponents:
    """Named entries of the intervalley-scattering potential.

    ``W_plus`` sits at (1, 4) and ``W_minus`` at (2, 3); they coincide under
    the first identification.
    """

    V_A: ScalarField
    V_B: ScalarField
    V: ScalarField
    V_prime: ScalarField
    W_A: ScalarField
    W_B: ScalarField
    W_plus: ScalarField
    W_minus: ScalarField

    def layout(self):
        """The components placed in the 4x4 disorder potential."""
        return Potential4x4((
            self.V_A, self.V, self.W_A, self.W_plus,
            self.V.conj(), self.V_B, self.W_minus, self.W_B,
            self.W_A.conj(), self.W_minus.conj(), self.V_A, self.V_prime,
            self.W_plus.conj(), self.W_B.conj(), self.V_prime.conj(), self.V_B,
        ))

    def as_dict(self):
        return {"V_A": self.V_A, "V_B": self.V_B, "V": self.V, "V'": self.V_prime,
                "W_A": self.W_A, "W_B": self.W_B, "W^+": self.W_plus, "W^-": self.W_minus}


def _field_gap(f, g, x, y, t):
    return float(np.max(np.abs(f(x, y, t) - g(x, y, t)), initial=0.0))


def disorder_identify(pair, scheme, points=None, tol=TOL_SCHEME):
    """Named disorder components for the ``"way1"`` or ``"way2"`` identification.

    ``way1`` requires ``a1 = d2`` and ``a2 = d1``; ``way2`` requires
    ``tau = pi/4`` and ``a1 = d1 + d2 - a2``. Both need ``epsilon = -1``.
    Constraints are checked on ``points`` (default: 33x33 over [-5, 5]^2).
    """
    p = pair.params
    if p.epsilon != -1:
        raise SchemeMismatch("disorder identifications require epsilon = -1")
    if points is None:
        g = np.linspace(-5.0, 5.0, 33)
        X, Y = np.meshgrid(g, g, indexing="ij")
        points = (X, Y, np.zeros_like(X))
    x, y, t = _points(points)
    a1, b1, d1 = pair.first.a, pair.first.b, pair.first.d
    a2, b2, d2 = pair.second.a, pair.second.b, pair.second.d
    scale = max(1.0, *(float(np.max(np.abs(f(x, y, t)), initial=0.0)) for f in (a1, a2, d1, d2)))
    c2, s2 = np.cos(p.tau) ** 2, np.sin(p.tau) ** 2
    sin2 = np.sin(2.0 * p.tau)
    em = np.exp(-1j * p.phi)

    if scheme == "way1":
        gap = max(_field_gap(a1, d2, x, y, t), _field_gap(a2, d1, x, y, t))
        if gap > tol * scale:
            raise SchemeMismatch(f"way1 needs a1 = d2 and a2 = d1 (mismatch {gap:.3e})")
        W_A = (b1 - b2) * (-0.5 * em * sin2)
        comps = DisorderComponents(
            V_A=d2 * c2 + d1 * s2,
            V_B=d1 * c2 + d2 * s2,
            V=b1 * c2 + b2 * s2,
            V_prime=-(b2 * c2 + b1 * s2).conj(),
            W_A=W_A,
            W_B=W_A.conj() * (-np.exp(-2j * p.phi)),
            W_plus=(d2 - d1) * (0.5 * em * sin2),
            W_minus=(d1 - d2) * (-0.5 * em * sin2),
        )
    elif scheme == "way2":
        if abs(p.tau - np.pi / 4.0) > 1e-12:
            raise SchemeMismatch(f"way2 needs tau = pi/4, got {p.tau}")
        gap = _field_gap(a1, d1 + d2 - a2, x, y, t)
        if gap > tol * scale:
            raise SchemeMismatch(f"way2 needs a1 = d1 + d2 - a2 (mismatch {gap:.3e})")
        half = (d1 + d2) * 0.5
        comps = DisorderComponents(
            V_A=half,
            V_B=half,
            V=(b1 + b2) * 0.5,
            V_prime=(b1 + b2).conj() * -0.5,
            W_A=(b2 - b1) * (0.5 * em),
            W_B=(b1 - b2).conj() * (0.5 * em),
            W_plus=(d1 + d2 - a2 * 2.0) * (0.5 * em),
            W_minus=(d1 - d2) * (-0.5 * em),
        )
    else:
        raise ParameterError(f"unknown disorder scheme {scheme!r}; use 'way1' or 'way2'")
    return comps
