"""Acceptance gate.

Each test prints one ``[criterion N] PASS|FAIL`` line (visible even under
output capture) and then asserts the same condition.  Run on its own with

    pytest tests/test_acceptance.py -v
"""

import math
import time

import numpy as np
import pytest

from sqjc import hilbert
from sqjc.hilbert import QState, Truncation
from sqjc.invariant import (
    SolutionSpec,
    SubspaceLabel,
    assemble_full_solution,
    assemble_rwa_solution,
    lvn_residual,
    n_prime_operator,
    solve_auxiliary_angles,
    spinor_block,
)
from sqjc.model import build_full_hamiltonian, build_rwa_hamiltonian, build_transformed_hamiltonian
from sqjc.propagator import convergence_check, propagate_many
from sqjc.schedules import CoefficientSet, Constant, Harmonic
from sqjc.squeezing import (
    InfeasibleConstraintError,
    SqueezedFrame,
    SqueezeTrajectory,
    numeric_transformed_hamiltonian,
    solve_constraints_forward,
    transform_coefficients,
    verify_constraints,
)

U0 = math.atanh(0.3)
T_GRID = np.linspace(0.0, 10.0, 101)
BRANCHES = [(m, s) for m in (0, 1, 2) for s in (1, -1)]
DT = 0.02


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
    return emit


def canonical_frame(u0=U0):
    traj, lam = solve_constraints_forward(Constant(1.0), Constant(0.2), u0)
    return SqueezedFrame(CoefficientSet(1.0, 1.0, 0.2, lam), traj)


def branch_specs(frame, n_max):
    specs = {}
    for m in (0, 1, 2):
        ang = solve_auxiliary_angles(frame.Omega, frame.omega0, frame.g, m, T_GRID)
        for s in (1, -1):
            specs[m, s] = SolutionSpec(SubspaceLabel(m, s), ang)
    return specs


def fidelities(frame, n_max, dt):
    """Fidelity series per branch between propagation and the exact solution."""
    tr = Truncation(n_max)
    specs = branch_specs(frame, n_max)
    exact = {key: [assemble_full_solution(sp, frame, t, tr) for t in T_GRID] for key, sp in specs.items()}
    H = lambda t: build_full_hamiltonian(frame.coeffs, t, tr)  # noqa: E731
    trajs = propagate_many(H, [exact[key][0] for key in BRANCHES], T_GRID, dt)
    return {key: np.array([abs(hilbert.inner(tj.state(k), exact[key][k])) ** 2 for k in range(len(T_GRID))])
            for key, tj in zip(BRANCHES, trajs)}, exact


def random_instances(n=20, seed=20240611):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        omega = Harmonic(rng.uniform(-0.3, 0.3), rng.uniform(0.2, 2), rng.uniform(0, 6), rng.uniform(0.5, 1.5))
        gamma = Harmonic(complex(*rng.normal(0, 0.2, 2)), rng.uniform(0.2, 2), rng.uniform(0, 6),
                         complex(*rng.normal(0, 0.3, 2)))
        lam = Harmonic(complex(*rng.normal(0, 0.1, 2)), rng.uniform(0.2, 2), rng.uniform(0, 6),
                       complex(*rng.normal(0, 0.1, 2)))
        coeffs = CoefficientSet(omega, rng.uniform(0.5, 1.5), gamma, lam)
        # modulus oscillates inside [0, 1]; phase drifts at a random rate
        u_mid = rng.uniform(0.1, 0.85)
        amp = rng.uniform(0, min(u_mid, 1 - u_mid) * 0.95)
        traj = SqueezeTrajectory(Harmonic(amp, rng.uniform(0.2, 2), rng.uniform(0, 6), u_mid),
                                 Harmonic(rng.uniform(0, 1), rng.uniform(0.2, 2), 0.0, rng.uniform(-np.pi, np.pi)),
                                 mode="general")
        out.append((coeffs, traj, rng.uniform(0.5, 5)))
    return out


def oracle_deviation(instances, a_form="corrected"):
    tr = Truncation(64)
    worst = 0.0
    for coeffs, traj, t in instances:
        assert abs(traj.zeta(t)) <= 1
        tc = transform_coefficients(coeffs, traj.zeta(t), traj.zeta_dot(t), t, a_form)
        closed = build_transformed_hamiltonian(tc, coeffs.omega0(t).real, tr)
        numeric = numeric_transformed_hamiltonian(coeffs, traj.zeta, t, 1e-5, tr)
        worst = max(worst, hilbert.interior_deviation(closed, numeric, tr))
    return worst


def test_criterion_1_transformation_oracle(report):
    start = time.perf_counter()
    dev = oracle_deviation(random_instances())
    elapsed = time.perf_counter() - start
    ok = dev < 1e-6 and elapsed < 60
    report(1, "transformation oracle", ok, f"max interior deviation {dev:.2e} (< 1e-6), {elapsed:.1f} s (< 60 s)")
    assert dev < 1e-6
    assert elapsed < 60


def test_criterion_2_constraint_closure(report):
    t = np.linspace(0, 10, 1000)
    instances = [
        (Constant(1.0), Constant(0.2), U0, 0.0),
        (Harmonic(0.3, 0.7, offset=1.0), Harmonic(0.1 + 0.05j, 1.3, offset=0.2), 0.6, 0.4),
        (Harmonic(0.5, 2.0, 0.3, 1.5), Harmonic(0.3j, 0.5, offset=0.1 - 0.2j), 1.0, -1.0),
    ]
    worst = dict(A=0.0, Lambda=0.0, C=0.0, Omega=0.0)
    for omega, gamma, u0, chi0 in instances:
        traj, lam = solve_constraints_forward(omega, gamma, u0, chi0)
        frame = SqueezedFrame(CoefficientSet(omega, 1.0, gamma, lam), traj)
        for s in t:
            tc = frame.transformed(s)
            worst["A"] = max(worst["A"], abs(tc.A))
            worst["Lambda"] = max(worst["Lambda"], abs(tc.Lambda))
            worst["C"] = max(worst["C"], abs(tc.C))
            worst["Omega"] = max(worst["Omega"], abs(tc.Omega - omega(s).real))
    ok = all(v < 1e-8 for v in worst.values())
    report(2, "constraint closure", ok, ", ".join(f"max|{k}|={v:.1e}" for k, v in worst.items()) + " (< 1e-8)")
    assert ok


def test_criterion_3_invariant_suite(report):
    frame = canonical_frame()
    tr = Truncation(32)
    N = n_prime_operator(tr)
    comm = max(float(np.max(np.abs(hilbert.commutator(
        N, build_rwa_hamiltonian(frame.Omega, frame.omega0, frame.g, s, tr)).matrix))) for s in T_GRID[::10])
    eig_exact = True
    for m in range(6):
        for v in hilbert.number_spinor(m, tr):
            eig_exact &= bool(np.array_equal((N @ v).vector, (m + 1) * v.vector))
    lvn = vres = 0.0
    for m in (0, 1, 2):
        ang = solve_auxiliary_angles(frame.Omega, frame.omega0, frame.g, m, T_GRID)
        lvn = max(lvn, max(lvn_residual(ang, s, tr) for s in T_GRID[1:-1:4]))
        for s in T_GRID[::5]:
            V, I = ang.v(s, tr), ang.invariant(s, tr)
            vres = max(vres, np.linalg.norm(spinor_block(V.dag() @ I @ V, m, tr) - np.diag([1, -1]), 2))
    ok = comm < 1e-12 and eig_exact and lvn < 1e-7 and vres < 1e-9
    report(3, "invariant suite", ok,
           f"[N',H]={comm:.1e} (< 1e-12), N' eigenvalue exact for m<=5: {eig_exact}, "
           f"LvN={lvn:.1e} (< 1e-7), |V^dag I V - sz|={vres:.1e} (< 1e-9)")
    assert ok


@pytest.fixture(scope="module")
def canonical_run():
    frame = canonical_frame()
    start = time.perf_counter()
    fid, exact = fidelities(frame, 32, DT)
    tr = Truncation(32)
    H = lambda t: build_full_hamiltonian(frame.coeffs, t, tr)  # noqa: E731
    # one superposition of all six branches certifies the step for every branch
    mix = sum((exact[key][0].vector for key in BRANCHES), np.zeros(tr.dim, complex))
    conv = convergence_check(H, QState(tr, mix / np.linalg.norm(mix)), T_GRID[-1], DT)
    return fid, conv, time.perf_counter() - start


def test_criterion_4_end_to_end(report, canonical_run):
    fid, conv, elapsed = canonical_run
    worst = 1 - min(f.min() for f in fid.values())
    ok = worst < 1e-6 and conv.passed and 3.2 <= conv.ratio <= 4.8 and elapsed < 120
    report(4, "end-to-end exactness", ok,
           f"max infidelity {worst:.1e} (< 1e-6) over m in 0..2, sigma=+-1; {conv.summary()}; {elapsed:.1f} s (< 120 s)")
    assert worst < 1e-6
    assert conv.passed and 3.2 <= conv.ratio <= 4.8
    assert elapsed < 120


def test_criterion_5_truncation_robustness(report, canonical_run):
    fid32 = canonical_run[0]
    fid64, _ = fidelities(canonical_frame(), 64, DT)
    change = max(abs(fid64[key][-1] - fid32[key][-1]) for key in BRANCHES)
    ok = change < 1e-8
    report(5, "truncation robustness", ok, f"endpoint fidelity change 32 -> 64: {change:.1e} (< 1e-8)")
    assert ok


def test_criterion_6_reductions(report):
    tr = Truncation(16)
    frame = canonical_frame(0.0)
    identical = True
    for m in (0, 1):
        ang = solve_auxiliary_angles(frame.Omega, frame.omega0, frame.g, m, T_GRID)
        for s in (1, -1):
            spec = SolutionSpec(SubspaceLabel(m, s), ang)
            for t in T_GRID[::10]:
                identical &= bool(np.array_equal(assemble_full_solution(spec, frame, t, tr).vector,
                                                  assemble_rwa_solution(spec, t, tr).vector))

    # constant resonant RWA: Rabi frequency from the invariant solution
    g = 0.2 * np.exp(0.3j)
    t = np.linspace(0, 10, 101)
    worst_rel = 0.0
    for m in (0, 1, 2):
        block = spinor_block(build_rwa_hamiltonian(1.0, 1.0, g, 0.0, tr), m, tr)
        split = np.ptp(np.linalg.eigvalsh(block))
        expected = 2 * math.sqrt(m + 1) * abs(g)
        ang = solve_auxiliary_angles(lambda s: 1.0, lambda s: 1.0, lambda s: g, m, t)
        specs = [SolutionSpec(SubspaceLabel(m, s), ang) for s in (1, -1)]
        up, _ = hilbert.number_spinor(m, tr)
        c = [np.conj(hilbert.inner(assemble_rwa_solution(sp, 0.0, tr), up)) for sp in specs]
        # P_e = (1 + cos(w t)) / 2 inverted inside the first half period
        half = t[(t > 0) & (t < 0.9 * np.pi / expected)]
        for s in half:
            psi = assemble_rwa_solution(specs[0], s, tr) * c[0] + assemble_rwa_solution(specs[1], s, tr) * c[1]
            pe = abs(hilbert.inner(up, psi)) ** 2
            w = math.acos(max(-1.0, min(1.0, 2 * pe - 1))) / s
            worst_rel = max(worst_rel, abs(w - expected) / expected, abs(split - expected) / expected)
    ok = identical and worst_rel < 1e-6
    report(6, "reduction checks", ok,
           f"u0=0 bit-for-bit equal to RWA: {identical}; Rabi frequency rel. error {worst_rel:.1e} (< 1e-6)")
    assert ok


def test_criterion_7_designed_failures(report):
    grid = np.linspace(0, 10, 501)
    non_rotating = verify_constraints(CoefficientSet(1.0, 1.0, 0.2, 0.06), grid)
    residual_flagged = non_rotating.max_abs_A > 1e-3 and not non_rotating.passed(1e-8)
    try:
        verify_constraints(CoefficientSet(1.0, 1.0, 0.2, 0.25), grid)
        infeasible_flagged = False
    except InfeasibleConstraintError:
        infeasible_flagged = True
    mutated = oracle_deviation(random_instances(), a_form="printed")
    mutant_caught = mutated >= 1e-6
    ok = residual_flagged and infeasible_flagged and mutant_caught
    report(7, "designed failures", ok,
           f"non-rotating lambda max|A|={non_rotating.max_abs_A:.2e} flagged: {residual_flagged}; "
           f"|lambda|>|gamma| infeasible: {infeasible_flagged}; "
           f"printed A oracle deviation {mutated:.2e} fails criterion 1: {mutant_caught}")
    assert ok
