"""Check schedules for each named suite.

A suite is a list of ``(check_id, thunk)`` pairs; thunks take no arguments
and return a :class:`CheckResult`.  Random inputs come from
:func:`rng_for`, a stream keyed by the run seed and the check id, so every
check is reproducible on its own and independent of scheduling order.
"""

import math
import zlib

import numpy as np

from .. import bosons, cogwheel, fermions, spinors
from ..fock import StateVector, make_boson_mode
from .checks import (
    check,
    check_completeness,
    check_eigenrelation,
    check_operator_identity,
    check_orthonormality,
    check_permutation,
)


def rng_for(seed: int, check_id: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(check_id.encode())])


# ------------------------------------------------------------------ cogwheel


def cogwheel_tasks(cfg):
    tol = cfg.tolerances
    tasks = []
    for D in cfg.cogwheel.dims:
        tag = f"cogwheel.D{D:02d}"
        tasks += [
            (f"{tag}.orthonormality",
             lambda D=D, i=f"{tag}.orthonormality": check_orthonormality(cogwheel.ontic_basis(D), tol.exact, i)),
            (f"{tag}.completeness",
             lambda D=D, i=f"{tag}.completeness": check_completeness(cogwheel.ontic_basis(D), tol.exact, i)),
            (f"{tag}.beable_cyclic_eigen", lambda D=D, i=f"{tag}.beable_cyclic_eigen": check_eigenrelation(
                cogwheel.beable_cyclic(D), cogwheel.ontic_basis(D),
                np.exp(1j * cogwheel.lattice_phases(D)), tol.exact, i)),
            (f"{tag}.beable_sg_residual", lambda D=D, i=f"{tag}.beable_sg_residual": _sg_residual(D, tol.sg_residual, i)),
            (f"{tag}.projectors_vs_cyclic", lambda D=D, i=f"{tag}.projectors_vs_cyclic": check_operator_identity(
                cogwheel.beable_from_projectors(D), cogwheel.beable_cyclic(D), tol.exact, i)),
            (f"{tag}.projectors_vs_sg_plus_wrap", lambda D=D, i=f"{tag}.projectors_vs_sg_plus_wrap": check_operator_identity(
                cogwheel.beable_from_projectors(D),
                cogwheel.beable_sg(D) + cogwheel.wraparound_element(D), tol.exact, i)),
            (f"{tag}.fock_from_ontic", lambda D=D, i=f"{tag}.fock_from_ontic": check(
                i, "operator-identity",
                max(cogwheel.fock_from_ontic(D, n).distance(cogwheel.mode_basis(D).basis_state([n]))
                    for n in range(D)),
                tol.exact)),
        ]
    omega = cfg.cogwheel.omega
    for D in cfg.cogwheel.evolution_dims:
        for j in range(D):
            cid = f"cogwheel.evolve.D{D:02d}.j{j:02d}.permutation"
            tasks.append((cid, lambda D=D, j=j, cid=cid: _cogwheel_permutation(D, j, omega, tol.evolution, cid)))
        cid = f"cogwheel.evolve.D{D:02d}.offlattice"
        tasks.append((cid, lambda D=D, cid=cid: _cogwheel_offlattice(cfg, D, omega, tol.evolution, cid)))
    return tasks


def _sg_residual(D, tol, cid):
    b = cogwheel.beable_sg(D)
    devs = []
    for phi, state in zip(cogwheel.lattice_phases(D), cogwheel.ontic_basis(D)):
        devs.append((b @ state - state * np.exp(1j * phi)).norm())
    target = D**-0.5
    measured = max(abs(r - target) for r in devs)
    return check(cid, "eigenrelation", measured, tol,
                 {"expected_residual": target, "max_residual": max(devs)})


def _cogwheel_permutation(D, j, omega, tol, cid):
    t = 2.0 * math.pi * j / (omega * D)
    U = cogwheel.evolve_mode(cogwheel.CogwheelMode(D, omega), t)
    perm = (np.arange(D) + j) % D
    return check_permutation(U, cogwheel.ontic_basis(D), perm, tol, cid, metadata={"t": t, "shift": j})


def _cogwheel_offlattice(cfg, D, omega, tol, cid):
    rng = rng_for(cfg.seed, cid)
    mode = cogwheel.CogwheelMode(D, omega)
    worst = 0.0
    for _ in range(cfg.cogwheel.random_times):
        t = rng.uniform(-50.0, 50.0)
        phi = rng.uniform(0.0, 2 * math.pi)
        out = cogwheel.evolve_mode(mode, t) @ cogwheel.phase_state(D, phi)
        target = cogwheel.phase_state(D, cogwheel.advanced_phase(phi, omega, t))
        worst = max(worst, out.distance(target))
    return check(cid, "permutation", worst, tol, {"samples": cfg.cogwheel.random_times})


# -------------------------------------------------------------------- bosons

BOSON_SUITES = {"scalar-real": "scalar_real", "scalar-complex": "scalar_complex", "vector": "vector"}


def _theory(cfg, F, M, D):
    ph = cfg.physics
    if cfg.bosons.lattice == "commensurate":
        lattice = bosons.commensurate_lattice(list(range(1, M + 1)), ph.mu)
        lattice = bosons.MomentumLattice(ph.delta_k, lattice.points)
    else:
        lattice = bosons.MomentumLattice.line(M, ph.delta_k)
    desc = bosons.TheoryDescriptor(F, lattice, D, c=ph.c, mu=ph.mu, hbar=ph.hbar)
    return bosons.build_theory(desc)


def boson_tasks(cfg, suite):
    tasks = []
    for F, M, D in getattr(cfg.bosons, BOSON_SUITES[suite]):
        tag = f"{suite}.F{F}M{M}D{D}"
        for name, fn in (
            ("orthonormality", _b_orthonormality),
            ("completeness", _b_completeness),
            ("beable_cyclic_eigen", _b_beable_eigen),
            ("beable_commute", _b_beable_commute),
            ("expand_roundtrip", _b_roundtrip),
            ("evolve_permutation", _b_permutation),
            ("evolve_offlattice", _b_offlattice),
            ("coefficient_transport", _b_transport),
            ("hamiltonian", _b_hamiltonian),
            ("dispersion", _b_dispersion),
        ):
            cid = f"{tag}.{name}"
            tasks.append((cid, lambda fn=fn, cid=cid, F=F, M=M, D=D: fn(cfg, _theory(cfg, F, M, D), cid)))
    return tasks


def _alpha_meta(theory):
    try:
        return {"alpha": theory.desc.alphas().tolist()}
    except ZeroDivisionError:
        return {"alpha": None}


def _b_orthonormality(cfg, theory, cid):
    lat = bosons.ontic_lattice_basis(theory)
    return check_orthonormality(lat.matrix, cfg.tolerances.multimode, cid, metadata=_alpha_meta(theory))


def _b_completeness(cfg, theory, cid):
    lat = bosons.ontic_lattice_basis(theory)
    return check_completeness(lat.matrix, cfg.tolerances.multimode, cid)


def _b_beable_eigen(cfg, theory, cid):
    lat = bosons.ontic_lattice_basis(theory)
    d = theory.desc
    worst = 0.0
    for f in range(d.families):
        for i in range(d.n_points):
            b, _ = bosons.beable_family(theory, f, i, "cyclic")
            k = theory.mode_index(f, i)
            eig = np.exp(2j * math.pi * lat.labels[:, k] / d.dim)
            res = check_eigenrelation(b, list(lat.matrix.T), eig, cfg.tolerances.multimode)
            worst = max(worst, res.measured)
    return check(cid, "eigenrelation", worst, cfg.tolerances.multimode, {"n_beables": d.n_modes})


def _b_beable_commute(cfg, theory, cid):
    d = theory.desc
    ops = []
    for f in range(d.families):
        for i in range(d.n_points):
            for variant in ("sg", "cyclic"):
                b, bd = bosons.beable_family(theory, f, i, variant)
                ops.append((theory.mode_index(f, i), b, bd))
    worst = 0.0
    for a in range(len(ops)):
        for c in range(a + 1, len(ops)):
            if ops[a][0] == ops[c][0]:
                continue
            for x in ops[a][1:]:
                for y in ops[c][1:]:
                    worst = max(worst, x.commutator(y).max_abs())
    return check(cid, "operator-identity", worst, cfg.tolerances.multimode)


def _random_state(rng, theory):
    v = rng.normal(size=theory.dim) + 1j * rng.normal(size=theory.dim)
    return StateVector(theory.basis, v)


def _b_roundtrip(cfg, theory, cid):
    rng = rng_for(cfg.seed, cid)
    lat = bosons.ontic_lattice_basis(theory)
    worst = 0.0
    prob_dev = 0.0
    for _ in range(cfg.bosons.random_states):
        state = _random_state(rng, theory)
        exp = bosons.expand_in_ontic(theory, state)
        rebuilt = lat.matrix @ exp.flat()
        scale = max(1.0, state.norm())
        worst = max(worst, float(np.linalg.norm(rebuilt - state.amplitudes)) / scale)
        prob_dev = max(prob_dev, abs(exp.probabilities.sum() - state.norm() ** 2) / scale**2)
    return check(cid, "completeness", max(worst, prob_dev), cfg.tolerances.multimode,
                 {"reconstruction": worst, "probability_sum": prob_dev,
                  "samples": cfg.bosons.random_states})


def _commensurate_time(theory):
    d = theory.desc
    return 2.0 * math.pi / (theory.mode_omegas.min() * d.dim)


def _b_permutation(cfg, theory, cid):
    t = _commensurate_time(theory)
    ev = bosons.evolve(theory, t)
    perm = ev.lattice_permutation()
    lat = bosons.ontic_lattice_basis(theory)
    if perm is None:
        return check(cid, "permutation", 1.0, cfg.tolerances.evolution,
                     {"t": t, "note": "frequencies not commensurate at this t"})
    return check_permutation(ev.operator, lat.matrix, perm, cfg.tolerances.evolution, cid,
                             metadata={"t": t, "shifts": ev.lattice_shift().tolist()})


def _b_offlattice(cfg, theory, cid):
    rng = rng_for(cfg.seed, cid)
    d = theory.desc
    worst = 0.0
    for _ in range(cfg.bosons.random_times):
        t = rng.uniform(-20.0, 20.0)
        phases = rng.uniform(0.0, 2 * math.pi, size=(d.families, d.n_points))
        ev = bosons.evolve(theory, t)
        out = ev.operator @ bosons.ontic_state(theory, phases)
        worst = max(worst, out.distance(bosons.ontic_state(theory, ev.shift_phases(phases))))
    return check(cid, "permutation", worst, cfg.tolerances.evolution, {"samples": cfg.bosons.random_times})


def _b_transport(cfg, theory, cid):
    rng = rng_for(cfg.seed, cid)
    t = _commensurate_time(theory)
    ev = bosons.evolve(theory, t)
    perm = ev.lattice_permutation()
    state = _random_state(rng, theory).normalized()
    before = np.abs(bosons.expand_in_ontic(theory, state).flat())
    after = np.abs(bosons.expand_in_ontic(theory, ev.operator @ state).flat())
    # label j at t=0 sits at perm[j] at time t
    measured = float(np.abs(after[perm] - before).max())
    return check(cid, "permutation", measured, cfg.tolerances.multimode, {"t": t})


def _b_hamiltonian(cfg, theory, cid):
    H = theory.hamiltonian()
    d = theory.desc
    ref = None
    for f in range(d.families):
        for i in range(d.n_points):
            term = theory.raising(f, i) @ theory.lowering(f, i) * (d.hbar * d.omegas[i])
            ref = term if ref is None else ref + term
    measured = max(H.max_deviation(ref), H.max_deviation(H.adjoint()))
    return check(cid, "operator-identity", measured, cfg.tolerances.multimode)


def _b_dispersion(cfg, theory, cid):
    rng = rng_for(cfg.seed, cid)
    ph = cfg.physics
    pts = rng.integers(-20, 21, size=(cfg.bosons.dispersion_points, 3)) * ph.delta_k
    vec = bosons.dispersion(pts, ph.c, ph.mu)
    worst = 0.0
    for k, w in zip(pts, vec):
        ref = ph.c * math.sqrt(math.fsum(float(x) ** 2 for x in k) + ph.mu**2)
        worst = max(worst, abs(w - ref) / ref)
    return check(cid, "operator-identity", worst, 1e-14, {"samples": len(pts)})


# ------------------------------------------------------------------ fermions


def _geometry(cfg, K):
    fc = cfg.fermion
    dirs = tuple(fermions.Direction(th, ph, fc.dtheta, fc.dphi) for th, ph in fc.directions)
    return fermions.FermionGeometry(dirs, K, cfg.physics.delta_r, cfg.physics.c)


def fermion_tasks(cfg):
    tasks = []
    for K in cfg.fermion.K:
        for s in (1, -1):
            tag = f"fermion.K{K}.s{'+' if s > 0 else '-'}"
            for name, fn in (
                ("transform_unitarity", _f_unitarity),
                ("car_table", _f_car),
                ("number_sum_identity", _f_number_sum),
                ("sea_is_vacuum", _f_sea),
                ("ontic_orthonormality", _f_orthonormality),
                ("ontic_completeness", _f_completeness),
                ("n_op_eigenbasis", _f_n_op_eigen),
                ("n_op_algebra", _f_n_op_algebra),
            ):
                cid = f"{tag}.{name}"
                tasks.append((cid, lambda fn=fn, cid=cid, K=K, s=s: fn(cfg, _block(cfg, K, s), cid)))
            for m in range(-2 * K, 2 * K + 1):
                cid = f"{tag}.evolve.m{m:+03d}"
                tasks.append((cid, lambda cid=cid, K=K, s=s, m=m: _f_evolve(cfg, _block(cfg, K, s), m, cid)))
    tasks += [
        ("fermion.gamma.clifford", lambda: _f_clifford(cfg, "fermion.gamma.clifford")),
        ("fermion.spinor.helicity", lambda: _f_helicity(cfg, "fermion.spinor.helicity")),
        ("fermion.spinor.normalization", lambda: _f_spinor_norm(cfg, "fermion.spinor.normalization")),
        ("fermion.spinor.weyl_solving", lambda: _f_weyl(cfg, "fermion.spinor.weyl_solving", True)),
        ("fermion.spinor.weyl_wrong_sign", lambda: _f_weyl(cfg, "fermion.spinor.weyl_wrong_sign", False)),
    ]
    return tasks


_BLOCKS = {}


def _block(cfg, K, s):
    geom = _geometry(cfg, K)
    key = (geom, s)
    if key not in _BLOCKS:
        _BLOCKS[key] = fermions.FermionBlock(geom, 0, s)
    return _BLOCKS[key]


def _f_meta(block):
    d = block.geom.directions[0]
    return {"beta": fermions.beta_factor(d, block.geom.delta_r), "q_hat": d.vector.tolist()}


def _f_unitarity(cfg, block, cid):
    w = block.transform()
    n = w.shape[0]
    measured = max(np.abs(w @ w.conj().T - np.eye(n)).max(), np.abs(w.conj().T @ w - np.eye(n)).max())
    return check(cid, "operator-identity", measured, cfg.tolerances.fermion_algebra, _f_meta(block))


def _f_car(cfg, block, cid):
    ops = block.site_operators()
    eye = block.basis.identity()
    worst = 0.0
    for i, (pi, _) in enumerate(ops):
        for j, (pj, pjd) in enumerate(ops):
            target = eye * (1.0 if i == j else 0.0)
            worst = max(worst, pi.anticommutator(pjd).max_deviation(target),
                        pi.anticommutator(pj).max_abs())
    return check(cid, "operator-identity", worst, cfg.tolerances.fermion_algebra)


def _f_number_sum(cfg, block, cid):
    ops = block.site_operators()
    total = None
    for psi, psid in ops:
        total = psid @ psi if total is None else total + psid @ psi
    return check_operator_identity(total, block.two_band_number_sum(), cfg.tolerances.fermion_basis, cid)


def _f_sea(cfg, block, cid):
    sea = block.sea_state()
    worst = max((psi @ sea).norm() for psi, _ in block.site_operators())
    empty = block.ontic_state([0] * block.geom.n_sites)
    bare = block.bare_vacuum()
    half = [float(bare.expectation(psid @ psi).real) for psi, psid in block.site_operators()]
    return check(cid, "eigenrelation", max(worst, sea.distance(empty)), cfg.tolerances.fermion_algebra,
                 {"bare_vacuum_site_density": half})


def _f_orthonormality(cfg, block, cid):
    _, mat = block.ontic_basis()
    return check_orthonormality(mat, cfg.tolerances.fermion_basis, cid)


def _f_completeness(cfg, block, cid):
    _, mat = block.ontic_basis()
    return check_completeness(mat, cfg.tolerances.fermion_basis, cid)


def _f_n_op_eigen(cfg, block, cid):
    labels, mat = block.ontic_basis()
    worst = 0.0
    for j in range(block.geom.n_sites):
        res = check_eigenrelation(block.n_op(j), list(mat.T), labels[:, j], cfg.tolerances.fermion_basis)
        worst = max(worst, res.measured)
    return check(cid, "eigenrelation", worst, cfg.tolerances.fermion_basis)


def _f_n_op_algebra(cfg, block, cid):
    n_sites = block.geom.n_sites
    ops = [block.n_op(j) for j in range(n_sites)]
    worst = 0.0
    for a in range(n_sites):
        worst = max(worst, (ops[a] @ ops[a]).max_deviation(ops[a]), ops[a].max_deviation(ops[a].adjoint()))
        for b in range(a + 1, n_sites):
            worst = max(worst, ops[a].commutator(ops[b]).max_abs())
    return check(cid, "operator-identity", worst, cfg.tolerances.fermion_basis)


def _f_evolve(cfg, block, m, cid):
    ev = block.evolve(m * block.geom.time_step, sign=cfg.fermion.evolution_sign,
                      vacuum_shift=cfg.fermion.vacuum_shift)
    labels, mat = block.ontic_basis()
    perm, phases, wraps = [], [], []
    for lab in labels:
        target, phase, w = ev.predict(lab)
        perm.append(block.basis.index(target))
        phases.append(phase)
        wraps.append(w)
    meta = {
        "t": ev.t,
        "site_shift": ev.site_shift,
        "global_phase": ev.global_phase,
        "wrap_counts": wraps,
        "predicted_signs": [int(round((p / ev.global_phase).real)) for p in phases],
    }
    return check_permutation(ev.operator, mat, perm, cfg.tolerances.fermion_evolution, cid,
                             predicted_phases=phases, metadata=meta)


def _f_clifford(cfg, cid):
    table = spinors.clifford_check(spinors.gamma_chiral())
    return check(cid, "operator-identity", table.max_residual, cfg.tolerances.clifford,
                 {"signature": list(table.signature), "scalars": table.scalars.real.tolist()})


def _random_k(cfg, cid):
    rng = rng_for(cfg.seed, cid)
    return rng.normal(size=(cfg.fermion.random_k, 3)) * rng.uniform(0.1, 10.0, size=(cfg.fermion.random_k, 1))


def _f_helicity(cfg, cid):
    worst = 0.0
    for k in _random_k(cfg, cid):
        h_op = spinors.helicity_operator(k)
        up, um = spinors.weyl_spinors(k)
        worst = max(worst, np.abs(h_op @ up - up).max(), np.abs(h_op @ um + um).max())
    return check(cid, "eigenrelation", worst, cfg.tolerances.helicity, {"samples": cfg.fermion.random_k})


def _f_spinor_norm(cfg, cid):
    worst = 0.0
    for k in _random_k(cfg, cid):
        up, um = spinors.weyl_spinors(k)
        worst = max(worst, abs(np.vdot(up, up) - 1), abs(np.vdot(um, um) - 1), abs(np.vdot(up, um)))
    return check(cid, "orthonormality", worst, cfg.tolerances.spinor_norm, {"samples": cfg.fermion.random_k})


def _f_weyl(cfg, cid, solving):
    worst = 0.0
    signs = set()
    for k in _random_k(cfg, cid):
        for h in (1, -1):
            sign = spinors.solving_frequency_sign(k, h, cfg.physics.c)
            signs.add((h, sign))
            if solving:
                worst = max(worst, spinors.weyl_plane_wave_residual(k, h, sign, cfg.physics.c))
            else:
                res = spinors.weyl_plane_wave_residual(k, h, -sign, cfg.physics.c)
                worst = max(worst, abs(res - 2 * np.linalg.norm(k)))
    return check(cid, "eigenrelation", worst, cfg.tolerances.weyl,
                 {"solving_sign_by_helicity": sorted(signs)})


# ----------------------------------------------------------- counterexamples


def counterexample_tasks(cfg):
    cx = cfg.counterexamples
    tol = cfg.tolerances
    tasks = [
        ("counterexamples.coherent.orthonormality", lambda: _cx_coherent_ortho(cfg)),
        ("counterexamples.coherent.completeness", lambda: _cx_coherent_complete(cfg)),
        ("counterexamples.coherent.overlap_formula", lambda: _cx_coherent_formula(cfg)),
        ("counterexamples.fermion_nilpotency.high_occupations", lambda: _cx_nilpotent(cfg, high=True)),
        ("counterexamples.fermion_nilpotency.low_occupations", lambda: _cx_nilpotent(cfg, high=False)),
        ("counterexamples.bosonic_dirac.car", lambda: _cx_dirac(cfg, "bosonic", "car")),
        ("counterexamples.bosonic_dirac.gram", lambda: _cx_dirac(cfg, "bosonic", "gram")),
        ("counterexamples.bosonic_dirac.fermionic_control_car", lambda: _cx_dirac(cfg, "fermionic_control", "car")),
        ("counterexamples.bosonic_dirac.fermionic_control_gram", lambda: _cx_dirac(cfg, "fermionic_control", "gram")),
    ]
    for D in cx.commutator_dims:
        cid = f"counterexamples.truncated_commutator.D{D:02d}"
        tasks.append((cid, lambda D=D, cid=cid: _cx_commutator(D, tol.exact, cid)))
        cid = f"counterexamples.truncated_commutator.D{D:02d}.closed_form"
        tasks.append((cid, lambda D=D, cid=cid: _cx_commutator_closed(D, tol.exact, cid)))
        cid = f"counterexamples.sg_eigenrelation.D{D:02d}"
        tasks.append((cid, lambda D=D, cid=cid: _cx_sg(D, tol.exact, cid)))
    return tasks


def _cx_coherent_ortho(cfg):
    cx = cfg.counterexamples
    fam = cogwheel.coherent_circle_family(cx.coherent_dim, cx.coherent_radius, cx.coherent_phases)
    gram = np.column_stack([s.amplitudes for s in fam])
    gram = gram.conj().T @ gram
    off = np.abs(gram - np.diag(np.diag(gram)))
    bound = math.exp(-2 * cx.coherent_radius**2)
    min_off = float(off[~np.eye(len(fam), dtype=bool)].min())
    return check_orthonormality(
        fam, cfg.tolerances.exact, "counterexamples.coherent.orthonormality",
        expected_fail=True, margin=bound - cfg.tolerances.coherent_overlap,
        metadata={"lower_bound": bound, "min_offdiag": min_off, "max_offdiag": float(off.max()),
                  "gram_rank": int(np.linalg.matrix_rank(gram))},
    )


def _cx_coherent_complete(cfg):
    cx = cfg.counterexamples
    fam = cogwheel.coherent_circle_family(cx.coherent_dim, cx.coherent_radius, cx.coherent_phases)
    return check_completeness(fam, cfg.tolerances.exact, "counterexamples.coherent.completeness",
                              expected_fail=True, margin=0.5)


def _cx_coherent_formula(cfg):
    D = cfg.counterexamples.coherent_dim
    rng = rng_for(cfg.seed, "counterexamples.coherent.overlap_formula")
    pairs = [(1.0, -1.0)] + [tuple(rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)) for _ in range(10)]
    worst = 0.0
    for z, zp in pairs:
        num = abs(cogwheel.coherent_overlap(D, z, zp))
        worst = max(worst, abs(num - math.exp(-abs(z - zp) ** 2 / 2)))
    return check("counterexamples.coherent.overlap_formula", "demo", worst, cfg.tolerances.coherent_overlap,
                 {"overlap_1_-1": abs(cogwheel.coherent_overlap(D, 1.0, -1.0)), "truncation": D})


def _cx_nilpotent(cfg, high):
    rep = cogwheel.fermion_phase_constraint_demo(cfg.counterexamples.nilpotency_n_max)
    norms = rep["projection_norms"]
    meta = {"projection_norms": [norms[n] for n in sorted(norms)],
            "bosonic_control_norms": [rep["bosonic_control_norms"][n] for n in sorted(norms)]}
    if high:
        measured = max(norms[n] for n in norms if n >= 2)
        return check("counterexamples.fermion_nilpotency.high_occupations", "demo", measured,
                     cfg.tolerances.nilpotency, meta)
    measured = min(norms[0], norms[1])
    return check("counterexamples.fermion_nilpotency.low_occupations", "demo", measured,
                 cfg.tolerances.nilpotency, meta, expected_fail=True, margin=0.5)


_DIRAC = {}


def _dirac_report(cfg):
    cx = cfg.counterexamples
    key = (cx.dirac_dim, cx.dirac_K, cfg.physics.delta_r)
    if key not in _DIRAC:
        _DIRAC[key] = fermions.bosonic_dirac_failure_demo(cx.dirac_dim, cx.dirac_K, delta_r=cfg.physics.delta_r)
    return _DIRAC[key]


def _cx_dirac(cfg, which, what):
    rep = _dirac_report(cfg)[which]
    cid = f"counterexamples.bosonic_dirac.{'' if which == 'bosonic' else 'fermionic_control_'}{what}"
    meta = {"pair_anticommutator": rep["pair_anticommutator"]}
    if what == "car":
        measured = rep["car_deviation"]
        tol, margin = cfg.tolerances.fermion_algebra, 0.5
    else:
        measured = rep["gram_offdiag"]
        tol, margin = cfg.tolerances.fermion_basis, 0.1
    if which == "bosonic":
        kind = "operator-identity" if what == "car" else "orthonormality"
        return check(cid, kind, measured, tol, meta, expected_fail=True, margin=margin)
    return check(cid, "demo", measured, tol, meta)


def _cx_commutator(D, tol, cid):
    a, adag, _ = make_boson_mode(D)
    comm = a.commutator(adag)
    top = complex(comm.toarray()[D - 1, D - 1])
    # deviation from I is D at the top level: the entry there is 1 - D
    return check_operator_identity(comm, np.eye(D), tol, cid, expected_fail=True, margin=D - tol,
                                   metadata={"top_entry": top.real, "dim": D})


def _cx_commutator_closed(D, tol, cid):
    a, adag, _ = make_boson_mode(D)
    expected = np.eye(D)
    expected[D - 1, D - 1] = 1.0 - D
    return check_operator_identity(a.commutator(adag), expected, tol, cid)


def _cx_sg(D, tol, cid):
    b = cogwheel.beable_sg(D)
    phis = cogwheel.lattice_phases(D)
    return check_eigenrelation(b, cogwheel.ontic_basis(D), np.exp(1j * phis), tol, cid,
                               expected_fail=True, margin=D**-0.5 - 1e-10)


SUITE_BUILDERS = {
    "cogwheel": cogwheel_tasks,
    "scalar-real": lambda cfg: boson_tasks(cfg, "scalar-real"),
    "scalar-complex": lambda cfg: boson_tasks(cfg, "scalar-complex"),
    "vector": lambda cfg: boson_tasks(cfg, "vector"),
    "fermion": fermion_tasks,
    "counterexamples": counterexample_tasks,
}
