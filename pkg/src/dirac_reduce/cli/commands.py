"""The six subcommands. Each fills a :class:`Report` and writes its data files."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import _accel
from ..algebra import Potential2x2, ReductionParams, total_transform, unitarity_defect
from ..errors import NotAdmissible, NotReducible, ParameterError, UnderdeterminedAngle
from ..models.crossed_comb import (CrossedCombParams, crossed_comb_bispinors, crossed_comb_mode,
                                   crossed_comb_potential, crossed_comb_printed_components,
                                   crossed_comb_reducible)
from ..models.poschl_teller import (Admissibility, PoschlTellerParams, jacobi_exponents, pt_admissible, pt_band_structure,
                                    pt_disorder_pair, pt_energy, pt_mode, pt_operator,
                                    pt_printed_components)
from ..models.soliton import (SolitonParams, soliton_bispinors, soliton_mu_lambda, soliton_pair,
                              soliton_printed_mu_lambda)
from ..models.spin_orbit import (scenario2_mass, scenario2_model, scenario2_printed_fields,
                                 spin_orbit_pair)
from ..numerics.discretize import eigen_in_gap
from ..numerics.grid import Grid1D, GridTX
from ..numerics.quadrature import quadrature
from ..numerics.residual import _relative_norm, operator_residual, residual_spacetime
from ..numerics.spinor import SampledBispinor, SampledSpinor
from ..reduction import (PerturbationBlock, ReducedPair, assemble, canonical_branch,
                         conjugation_oracle, detect_samples, disorder_identify, expectation, lift,
                         perturbation_lift)
from ..sampling import random_block
from . import fileio
from .config import _k_grid
from .exprs import field_from_expression, number

SPIN_ORBIT = ReductionParams(np.pi / 4.0, np.pi / 2.0, 1)
BILAYER = ReductionParams(np.pi / 4.0, 0.0, 1)


# --------------------------------------------------------------------------
# model plumbing
# --------------------------------------------------------------------------


def k_values(cfg):
    k = cfg.params.get("k_y")
    return np.array([0.0]) if k is None else np.atleast_1d(np.asarray(k, dtype=float))


def model_pair(cfg):
    """The reduced pair that defines the coupled potential of the configured model."""
    p = cfg.params
    if cfg.model == "poschl_teller":
        return pt_disorder_pair(p["delta"], p["delta2"], cfg.reduction)
    if cfg.model == "crossed_combs":
        c1, c2 = CrossedCombParams(p["m1"], p["omega1"]), CrossedCombParams(p["m2"], p["omega2"])
        return crossed_comb_reducible(c1, c2, p["phi"]).pair
    if cfg.model == "soliton":
        return soliton_pair(SolitonParams(p["m"], p["omega"]), p["Delta"], p["phi"])
    if cfg.model == "scenario2":
        M = scenario2_mass(p["delta"], p["k_y"])
        return spin_orbit_pair(M, -M, -M + 2.0 * p["V2"], p["phi"])
    return ReducedPair(p["first"], p["second"], cfg.reduction)


def _coords(grid):
    x, y, t = grid.coords()
    shape = tuple(grid.shape)
    return tuple(np.broadcast_to(np.asarray(c, dtype=float), shape) for c in (x, y, t))


def _params_dict(params):
    return {"tau": params.tau, "phi": params.phi, "epsilon": params.epsilon}


def _write_pair(path, grid, pair):
    x, y, t = _coords(grid)
    names, cols = ["x", "y", "t"], [x, y, t]
    for label, V in (("first", pair.first), ("second", pair.second)):
        m = V.matrix(x, y, t)
        for i in range(2):
            for j in range(2):
                names += [f"re_{label}{i + 1}{j + 1}", f"im_{label}{i + 1}{j + 1}"]
                cols += [m[..., i, j].real, m[..., i, j].imag]
    return fileio.write_table(path, names, cols)


def _rel(a, b):
    return float(np.max(np.abs(a - b), initial=0.0) / max(1.0, float(np.max(np.abs(b), initial=0.0))))


def _herm_defect(M):
    """Hermiticity defect relative to ``max(1, max |M|)``."""
    return _rel(M, np.conj(np.swapaxes(M, -1, -2)))


def _stationary_residual(V, psi, energy, epsilon=1, k_y=None):
    r, mask = operator_residual(V, psi, energy=energy, epsilon=epsilon, k_y=k_y)
    return _relative_norm(r, psi, mask)


def _workers():
    cap = _accel.thread_cap()
    return cap if cap is not None else min(8, os.cpu_count() or 1)


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------


def _gap_edge(delta, k):
    return min(abs(k - 2.0 * delta), abs(k + 2.0 * delta))


def cmd_spectrum(cfg, report, out):
    if cfg.model != "poschl_teller":
        raise ParameterError(f"model {cfg.model!r} has no band structure; spectrum needs poschl_teller")
    opts = cfg.section("spectrum")
    tol = cfg.tolerances["spectrum"]
    delta = cfg.params["delta"]
    half_width = float(opts["half_width"])
    ns = opts["n"] if opts["n"] is not None else cfg.params["n"]
    ns = [ns] if isinstance(ns, int) else list(ns)
    raw_k = opts["k_y"] if opts["k_y"] is not None else cfg.raw.get("params", {}).get("k_y")
    ks = k_values(cfg) if opts["k_y"] is None else _k_grid(opts["k_y"], "spectrum.k_y")
    # a {min, max, count} sweep skips points without a normalizable closed form;
    # explicit values only need the reference admissibility and are then compared
    sweep = isinstance(raw_k, dict)

    pairs, skipped = [], []
    for n in ns:
        for k in ks:
            pt = PoschlTellerParams(delta, float(k), int(n))
            adm = pt_admissible(pt, strict=sweep)
            if adm and sweep and delta / min(jacobi_exponents(pt)) > half_width / 3.0:
                adm = Admissibility(False, "decay length exceeds a third of the box half-width")
            if adm:
                pairs.append((int(n), float(k)))
            elif sweep:
                skipped.append({"n": int(n), "k_y": float(k), "reason": adm.reason})
            else:
                raise NotAdmissible(f"n={n}, k_y={k:g}: {adm.reason}")
    if not pairs:
        raise NotAdmissible("no admissible (n, k_y) point in the requested sweep")
    ks = np.array(sorted({k for _, k in pairs}, key=list(map(float, ks)).index))

    grid = Grid1D.symmetric(half_width, int(opts["n_points"]))

    def solve(k):
        op = pt_operator(PoschlTellerParams(delta, float(k), 1), grid, opts["scheme"])
        window = (float(opts["window_low"]), 0.999 * _gap_edge(delta, k))
        if not window[0] < window[1]:
            return np.empty(0), 0
        states = eigen_in_gap(op, window, method=opts["method"])
        return states.energies, states.n_filtered

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        solved = list(pool.map(solve, ks))

    found_at = {float(k): f for k, (f, _) in zip(ks, solved)}
    rows = []
    for n, k in pairs:
        found = found_at[k]
        e = pt_energy(PoschlTellerParams(delta, k, n))
        e_num = float(found[np.argmin(np.abs(found - e))]) if len(found) else float("nan")
        rows.append((n, k, e, e_num, abs(e_num - e)))
    rows_arr = np.array(rows, dtype=float)
    path = fileio.write_table(out / "spectrum.csv", ["n", "k_y", "E_analytic", "E_numeric", "abs_err"],
                              rows_arr.T, sep=",")
    report.files.append(path.name)
    report.results["rows"] = [dict(zip(("n", "k_y", "E_analytic", "E_numeric", "abs_err"), r))
                              for r in rows]
    report.results["eigenvalues_in_gap"] = {f"{k:g}": list(f) for k, (f, _) in zip(ks, solved)}
    report.results["filtered_states"] = {f"{k:g}": int(c) for k, (_, c) in zip(ks, solved)}
    report.results["skipped"] = skipped
    report.results["solver"] = {"n_points": int(opts["n_points"]), "half_width": float(opts["half_width"]),
                                "scheme": opts["scheme"], "method": opts["method"]}
    for n, k, e, e_num, err in rows:
        report.check(f"spectrum n={int(n)} k_y={k:g}", err, tol)


# --------------------------------------------------------------------------
# modes
# --------------------------------------------------------------------------


def _slice_normalized(spinor):
    """Normalize every time slice of a (t, x) state to unit x-probability."""
    norms = np.asarray(spinor.norm(over=["x"]), dtype=float)
    if np.any(norms == 0.0):
        raise ParameterError("a time slice of the state vanishes identically")
    comps = spinor.components / norms[None, :, None]
    return type(spinor)(spinor.grid, comps, {}, spinor.convention, spinor.label)


def _emit_modes(report, out, stem, state, tol):
    if isinstance(state.grid, GridTX):
        state = _slice_normalized(state)
        prob = np.real(np.asarray(state.norm(over=["x"]))) ** 2
        err = float(np.max(np.abs(prob - 1.0)))
        report.results.setdefault("probability", {})[stem] = {"per_time_slice_max_dev": err}
    else:
        state = state.normalized()
        prob = float(np.real(state.norm()) ** 2)
        err = abs(prob - 1.0)
        report.results.setdefault("probability", {})[stem] = {"total": prob}
    for p in fileio.write_spinor(out, stem, state.grid, state):
        report.files.append(p.name)
    report.check(f"probability {stem}", err, tol)


def cmd_modes(cfg, report, out):
    p, grid = cfg.params, cfg.grid
    tol = 1e-8
    if cfg.model == "poschl_teller":
        for n in p["n"]:
            for i, k in enumerate(k_values(cfg)):
                pt = PoschlTellerParams(p["delta"], float(k), n)
                psi = pt_mode(pt, grid)
                report.results.setdefault("energies", {})[f"n{n}_k{i}"] = pt_energy(pt)
                _emit_modes(report, out, f"pt_n{n}_k{i}", psi, tol)
    elif cfg.model == "crossed_combs":
        c1, c2 = CrossedCombParams(p["m1"], p["omega1"]), CrossedCombParams(p["m2"], p["omega2"])
        _emit_modes(report, out, "psi", crossed_comb_mode(c1, grid, "x"), tol)
        _emit_modes(report, out, "xi", crossed_comb_mode(c2, grid, "y"), tol)
        Psi, Xi = crossed_comb_bispinors(c1, c2, p["phi"], grid)
        _emit_modes(report, out, "Psi", Psi, tol)
        _emit_modes(report, out, "Xi", Xi, tol)
        report.results["energies"] = {"Psi": c1.m, "Xi": c2.m}
    elif cfg.model == "soliton":
        sp = SolitonParams(p["m"], p["omega"])
        for S, name in zip(soliton_bispinors(sp, p["phi"], grid), ("Psi1", "Psi2")):
            _emit_modes(report, out, name, S, tol)
    elif cfg.model == "scenario2":
        for n in p["n"]:
            s = scenario2_model(p["delta"], p["k_y"], p["V2"], n, grid, p["phi"])
            Psi, Xi = s.lifted()
            report.results.setdefault("energies", {})[f"n{n}"] = list(s.energies)
            for stem, st in (("psi", s.psi), ("xi", s.xi), ("Psi", Psi), ("Xi", Xi)):
                _emit_modes(report, out, f"{stem}_n{n}", st, tol)
    else:
        raise ParameterError("model 'custom' has no closed-form modes")


# --------------------------------------------------------------------------
# assemble / detect
# --------------------------------------------------------------------------


def cmd_assemble(cfg, report, out):
    pair = model_pair(cfg)
    x, y, t = _coords(cfg.grid)
    M = assemble(pair).matrix(x, y, t)
    oracle = conjugation_oracle(pair, x, y, t)
    path = fileio.write_potential(out / "potential.dat", x, y, t, M)
    report.files.append(path.name)
    report.files.append(_write_pair(out / "reduced_pair.dat", cfg.grid, pair).name)
    report.results["params"] = _params_dict(pair.params)
    report.results["n_points"] = int(np.prod(cfg.grid.shape))
    report.check("hermiticity", _herm_defect(M), 1e-12, passed=_herm_defect(M) <= 1e-12)
    report.check("conjugation identity", _rel(M, oracle), cfg.tolerances["conjugation"])


def _resolve(path, cfg):
    path = Path(path)
    if path.is_absolute() or path.exists() or not cfg.source:
        return path
    return Path(cfg.source).parent / path


def cmd_detect(cfg, report, out, input_path=None):
    src = input_path or cfg.section("detect")["input"]
    if src is None:
        raise ParameterError("detect needs an input potential file (--input or detect.input)")
    src = _resolve(src, cfg)
    eps = cfg.section("detect")["epsilon"]
    if eps not in (1, -1):
        raise ParameterError(f"detect.epsilon must be +1 or -1, got {eps!r}")
    x, y, t, M = fileio.read_potential(src)
    report.inputs["input_file"] = str(src)
    report.results["n_points"] = int(M.shape[0])
    try:
        res = detect_samples(M, eps, tol=cfg.tolerances["detect"])
    except UnderdeterminedAngle as exc:
        report.results["status"] = "UnderdeterminedAngle"
        report.violations.append({"kind": "UnderdeterminedAngle", "message": str(exc)})
        report.check("reducible", None, 0.0, passed=False, note="UnderdeterminedAngle")
        return
    except NotReducible as exc:
        report.results["status"] = "NotReducible"
        report.violations.append({"kind": "NotReducible", "message": str(exc), **exc.report})
        report.check("reducible", exc.report.get("magnitude"), exc.report.get("threshold", 0.0),
                     passed=False, note="NotReducible")
        return
    report.results["status"] = "reducible"
    report.results["params"] = _params_dict(res.params)
    report.results["cot_2tau"] = res.cot_2tau
    report.results["phase_spread"] = res.phase_spread
    report.results["max_violation"] = res.max_violation
    names, cols = ["x", "y", "t"], [x, y, t]
    for label, m in (("first", res.first), ("second", res.second)):
        for i in range(2):
            for j in range(2):
                names += [f"re_{label}{i + 1}{j + 1}", f"im_{label}{i + 1}{j + 1}"]
                cols += [m[:, i, j].real, m[:, i, j].imag]
    report.files.append(fileio.write_table(out / "detected_pair.dat", names, cols).name)
    scale = float(np.max(np.abs(M)))
    report.check("reducible", res.max_violation, cfg.tolerances["detect"] * max(scale, 1.0),
                 passed=True)


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def _perturbation_checks(cfg, report, states):
    opts = cfg.section("verify")
    rng = np.random.default_rng(int(opts["seed"]))
    tol = cfg.tolerances["expectation"]
    params = model_pair(cfg).params
    worst = 0.0
    for b in range(int(opts["random_blocks"])):
        # every state lives on the configured grid: sample each block once
        x, y, t = cfg.grid.coords()
        dV = perturbation_lift(random_block(rng), params).matrix(x, y, t)
        for name, S in states:
            val = abs(expectation(S, dV)) / float(np.real(S.norm()) ** 2)
            worst = max(worst, val)
            report.results.setdefault("perturbation", []).append(
                {"block": b, "state": name, "relative_expectation": val})
    report.check(f"perturbation expectation ({opts['random_blocks']} blocks x {len(states)} states)",
                 worst, tol)


def _common_checks(cfg, report):
    pair = model_pair(cfg)
    x, y, t = _coords(cfg.grid)
    tol = cfg.tolerances["conjugation"]
    report.results["params"] = _params_dict(pair.params)
    report.check("unitarity of T", unitarity_defect(total_transform(pair.params)), 1e-12)
    V = assemble(pair)
    report.check("conjugation identity", _rel(V.matrix(x, y, t), conjugation_oracle(pair, x, y, t)), tol)
    pf = cfg.section("verify")["potential_file"]
    if pf is not None:
        src = _resolve(pf, cfg)
        fx, fy, ft, M = fileio.read_potential(src)
        report.inputs["potential_file"] = str(src)
        report.check("conjugation identity (stored potential)", _rel(M, conjugation_oracle(pair, fx, fy, ft)),
                     max(tol, 1e-12))
    return pair, V


def _verify_pt(cfg, report, pair, V):
    p, grid = cfg.params, cfg.grid
    tol = cfg.tolerances["residual"]
    delta = p["delta"]
    states = []
    for n in p["n"]:
        for k in k_values(cfg):
            pt = PoschlTellerParams(delta, float(k), n)
            psi = pt_mode(pt, grid)
            e = pt_energy(pt)
            report.check(f"PT residual n={n} k_y={k:g}",
                         _stationary_residual(pair.first, psi, e, k_y=float(k)), tol)
            Psi, _ = lift(psi, None, pair.params)
            report.check(f"PT lifted residual n={n} k_y={k:g}",
                         _stationary_residual(V, Psi, e, pair.params.epsilon, float(k)), tol)
            states.append((f"PT n={n} k_y={k:g}", Psi))
    # band containment over a k_y sweep
    ks = np.linspace(-4.0 * delta, 4.0 * delta, 101)
    n_top = int(np.floor(4.0 * delta * delta + 1e-12))
    bands = pt_band_structure(delta, range(1, max(n_top, 1) + 1), ks)
    margin = min((_gap_edge(delta, k) - e for _, k, e in bands), default=np.inf)
    report.results["bands"] = {"points": int(len(bands)), "min_margin": float(margin)}
    report.check("band containment: E_n - min|k_y -+ 2 delta| < 0", -margin, 0.0)
    # printed intervalley components
    comps = disorder_identify(pair, "way1")
    printed = pt_printed_components(delta, p["delta2"], pair.params)
    x, y, t = _coords(grid)
    y = x  # exercise the y-profile as well
    gap = max(_rel(printed[k](x, y, t), getattr(comps, a)(x, y, t))
              for k, a in (("V", "V"), ("V'", "V_prime"), ("W_A", "W_A"), ("W_B", "W_B")))
    report.check("intervalley components match closed form", gap, 1e-12)
    return states


def _verify_crossed(cfg, report, pair, V):
    p, grid = cfg.params, cfg.grid
    tol = cfg.tolerances["residual"]
    c1, c2 = CrossedCombParams(p["m1"], p["omega1"]), CrossedCombParams(p["m2"], p["omega2"])
    psi, xi = crossed_comb_mode(c1, grid, "x"), crossed_comb_mode(c2, grid, "y")
    report.check("comb residual psi", _stationary_residual(pair.first, psi, c1.m), tol)
    report.check("comb residual xi", _stationary_residual(pair.second, xi, c2.m), tol)
    Psi, Xi = lift(psi, xi, pair.params)
    eps = pair.params.epsilon
    report.check("comb lifted residual Psi", _stationary_residual(V, Psi, c1.m, eps), tol)
    report.check("comb lifted residual Xi", _stationary_residual(V, Xi, c2.m, eps), tol)
    sysm = crossed_comb_reducible(c1, c2, p["phi"])
    printed = crossed_comb_printed_components(c1, c2, p["phi"])
    x, y, t = _coords(grid)
    report.results["printed_component_discrepancy"] = {
        "V_A": _rel(printed["V_A"](x, y, t), sysm.V_A(x, y, t)),
        "W^+": _rel(printed["W^+"](x, y, t), sysm.W_plus(x, y, t)),
        "note": "assembled potential is canonical; the reference-form V_A and W^+ are not used",
    }
    return [("Psi", Psi), ("Xi", Xi)]


def _verify_soliton(cfg, report, pair, V):
    p, grid = cfg.params, cfg.grid
    tol = cfg.tolerances["residual"]
    sp = SolitonParams(p["m"], p["omega"])
    states = soliton_bispinors(sp, p["phi"], grid)
    for S, name in zip(states, ("Psi1", "Psi2")):
        report.check(f"soliton residual {name}", residual_spacetime(V, S, epsilon=pair.params.epsilon), tol)
    x, y, t = _coords(grid)
    f = soliton_mu_lambda(sp, p["Delta"])
    pf = soliton_printed_mu_lambda(sp, p["Delta"])
    D = f.Delta(x, y, t)
    report.check("soliton Delta constant", float(np.max(np.abs(D - p["Delta"]))), 1e-12)
    report.check("soliton mu matches closed form", _rel(f.mu(x, y, t), pf.mu(x, y, t)), 1e-12)
    report.check("soliton lambda matches closed form", _rel(f.lambda_(x, y, t), pf.lambda_(x, y, t)), 1e-12)
    report.check("soliton lambda + 2 mu = 0", _rel(f.lambda_(x, y, t) + 2.0 * f.mu(x, y, t), 0.0 * D), 1e-12)
    a, b = states
    overlap = quadrature(np.sum(np.conj(a.components) * b.components, axis=0), grid, over=["x"])
    na = np.real(np.asarray(a.norm(over=["x"])))
    nb = np.real(np.asarray(b.norm(over=["x"])))
    report.check("soliton states orthogonal per time slice", float(np.max(np.abs(overlap) / (na * nb))), 1e-10)
    return [("Psi1", a), ("Psi2", b)]


def _verify_scenario2(cfg, report, pair, V):
    p, grid = cfg.params, cfg.grid
    states = []
    for n in p["n"]:
        s = scenario2_model(p["delta"], p["k_y"], p["V2"], n, grid, p["phi"])
        tol = cfg.tolerances["residual"]
        report.check(f"scenario2 residual psi n={n}", residual_spacetime(pair.first, s.psi), tol)
        report.check(f"scenario2 residual xi n={n}", residual_spacetime(pair.second, s.xi), tol)
        Psi, Xi = s.lifted()
        tl = cfg.tolerances["residual_lifted"]
        report.check(f"scenario2 lifted residual Psi n={n}", residual_spacetime(V, Psi, epsilon=1), tl)
        report.check(f"scenario2 lifted residual Xi n={n}", residual_spacetime(V, Xi, epsilon=1), tl)
        states += [(f"Psi n={n}", Psi), (f"Xi n={n}", Xi)]
    x, y, t = _coords(grid)
    pf = scenario2_printed_fields(p["delta"], p["k_y"], p["V2"])
    fields = s.fields
    gap = max(_rel(pf.Delta(x, y, t), fields.Delta(x, y, t)), _rel(pf.mu(x, y, t), fields.mu(x, y, t)),
              _rel(pf.lambda_(x, y, t), fields.lambda_(x, y, t)))
    report.check("scenario2 (Delta, mu, lambda) match closed form", gap, 1e-12)
    return states


def _verify_custom(cfg, report, pair, V):
    x, y, t = _coords(cfg.grid)
    M = V.matrix(x, y, t).reshape(-1, 4, 4)
    expected = canonical_branch(pair.params)[0]
    try:
        res = detect_samples(M, pair.params.epsilon, tol=cfg.tolerances["detect"])
    except (UnderdeterminedAngle, NotReducible) as exc:
        report.violations.append({"kind": type(exc).__name__, "message": str(exc)})
        report.check("detect round trip", None, 1e-10, passed=False, note=type(exc).__name__)
        return []
    got = canonical_branch(res.params)[0]
    err = max(abs(got.tau - expected.tau), abs(np.angle(np.exp(1j * (got.phi - expected.phi)))))
    report.results["detected"] = _params_dict(got)
    report.check("detect round trip (tau, phi)", err, 1e-10)
    return []


def cmd_verify(cfg, report, out):
    pair, V = _common_checks(cfg, report)
    handler = {"poschl_teller": _verify_pt, "crossed_combs": _verify_crossed,
               "soliton": _verify_soliton, "scenario2": _verify_scenario2,
               "custom": _verify_custom}[cfg.model]
    states = handler(cfg, report, pair, V)
    if states:
        _perturbation_checks(cfg, report, states)


# --------------------------------------------------------------------------
# perturb
# --------------------------------------------------------------------------


def printed_pattern(v, mode):
    """Closed-form transformed perturbation at the spin-orbit or bilayer point.

    ``v`` holds the sampled ``v1..v4``; returns samples of shape ``(..., 4, 4)``.
    """
    v1, v2, v3, v4 = v
    c = np.conj
    if mode == "spin_orbit":
        rows = [[v1.imag, 0.5j * (c(v3) - v2), 0.5 * (v2 + c(v3)), v1.real],
                [-0.5j * (v3 - c(v2)), v4.imag, v4.real, 0.5 * (c(v2) + v3)],
                [0.5 * (c(v2) + v3), v4.real, -v4.imag, -0.5j * (c(v2) - v3)],
                [v1.real, 0.5 * (v2 + c(v3)), 0.5j * (v2 - c(v3)), -v1.imag]]
    else:
        rows = [[-v1.real, -0.5 * (c(v3) + v2), 0.5 * (v2 - c(v3)), 1j * v1.imag],
                [-0.5 * (v3 + c(v2)), -v4.real, 1j * v4.imag, 0.5 * (v3 - c(v2))],
                [0.5 * (c(v2) - v3), -1j * v4.imag, v4.real, 0.5 * (c(v2) + v3)],
                [-1j * v1.imag, 0.5 * (c(v3) - v2), 0.5 * (v2 + c(v3)), v1.real]]
    shape = np.shape(v1)
    out = np.empty(shape + (4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            out[..., i, j] = rows[i][j]
    return out


def cmd_perturb(cfg, report, out, mode=None):
    opts = cfg.section("perturb")
    fields = [field_from_expression(opts[k]) for k in ("v1", "v2", "v3", "v4")]
    block = PerturbationBlock(*fields)
    if mode == "spin_orbit":
        params = SPIN_ORBIT
    elif mode == "bilayer":
        params = BILAYER
    else:
        eps = opts["epsilon"]
        if isinstance(eps, bool) or eps not in (1, -1):
            raise ParameterError(f"perturb.epsilon must be +1 or -1, got {eps!r}")
        params = ReductionParams(number(opts["tau"], "perturb.tau"), number(opts["phi"], "perturb.phi"), eps)
    x, y, t = _coords(cfg.grid)
    M = perturbation_lift(block, params).matrix(x, y, t)
    report.results["params"] = _params_dict(params)
    report.results["mode"] = mode or "generic"
    report.files.append(fileio.write_potential(out / "perturbation.dat", x, y, t, M).name)
    report.check("hermiticity", _herm_defect(M), 1e-12, passed=_herm_defect(M) <= 1e-12)
    if mode is not None:
        v = [f(x, y, t) for f in fields]
        report.check(f"{mode} closed-form pattern", _rel(M, printed_pattern(v, mode)),
                     cfg.tolerances["conjugation"])


COMMANDS = {
    "spectrum": cmd_spectrum,
    "modes": cmd_modes,
    "assemble": cmd_assemble,
    "detect": cmd_detect,
    "verify": cmd_verify,
    "perturb": cmd_perturb,
}
TOL_TARGET = {
    "spectrum": ("spectrum",),
    "modes": (),
    "assemble": ("conjugation",),
    "detect": ("detect",),
    "verify": ("residual", "residual_lifted"),
    "perturb": ("conjugation",),
}
