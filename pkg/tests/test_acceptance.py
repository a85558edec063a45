"""Acceptance checks, one block per criterion.

Each test carries ``criterion(n)``; the summary hook in conftest turns the
outcomes into one PASS/FAIL line per criterion.  Known-unattainable sub-checks
are strict xfails so that an accidental pass is reported loudly.
"""

import itertools
import math
import time

import numpy as np
import pytest

from entglkit import seeding, zoo
from entglkit.distill import (
    distill_test_1copy,
    robustness_distill_details,
)
from entglkit.montecarlo import random_density, volume_experiment
from entglkit.permcrit import (
    PermutationCriterion,
    classify_independent,
    criterion_value,
    global_transpose,
    permutation_witness,
    product,
    realignment_perm,
)
from entglkit.protocol import (
    BellIndex,
    breeding_yield,
    bxor_bell,
    max_conversion_prob,
    nielsen_feasible,
    qpa_sort,
    qpa_step,
    recurrence_step,
)
from entglkit.qstate import (
    QuantumState,
    is_ppt,
    max_entangled_projector,
    partial_transpose,
    random_product_state,
    realign,
    trace_norm,
)
from entglkit.robustness import gen_schmidt_robustness_maxent
from entglkit.witness import (
    LinearMapSpec,
    WitnessOperator,
    apply_map_one_sided,
    evaluate_witness,
    map_to_witness,
    schmidt_witness,
    witness_to_map,
)

from conftest import random_hermitian, random_state


def report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


def crit(n):
    return pytest.mark.criterion(n)


def eig_min(m):
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())


# -- 1 -------------------------------------------------------------------------------


@crit(1)
@pytest.mark.parametrize("r, count", [(2, 3), (3, 7), (4, 23)])
def test_c01_orbit_counts(r, count):
    t0 = time.perf_counter()
    c = classify_independent(r)
    dt = time.perf_counter() - t0
    ok = c.orbit_count == count and c.includes_identity and dt < 60
    assert report(1, ok, f"r={r} orbits={c.orbit_count} time={dt:.1f}s")


# -- 2 -------------------------------------------------------------------------------


@crit(2)
def test_c02_chessboard_realignment():
    val = trace_norm(realign(zoo.chessboard().state))
    assert report(2, abs(val - 7 / 6) <= 1e-9, f"norm={val!r}")


# -- 3 -------------------------------------------------------------------------------


@crit(3)
def test_c03_permutation_witness():
    s = zoo.chessboard().state
    w = permutation_witness(s, PermutationCriterion.of(realignment_perm(), 3))
    on_state = np.trace(w @ s.matrix).real
    gen = np.random.default_rng(3)
    worst = min(np.trace(w @ random_product_state((3, 3), gen).matrix).real for _ in range(1000))
    ok = abs(on_state + 1 / 6) <= 1e-8 and worst >= -1e-8
    assert report(3, ok, f"Tr(rho W)={on_state:.12f} min over products={worst:.3e}")


# -- 4 -------------------------------------------------------------------------------


@crit(4)
def test_c04_stormer_ppt_window():
    grid = np.round(np.arange(1.0, 4.0 + 1e-9, 0.1), 10)
    worst = min(eig_min(partial_transpose(zoo.stormer(a).state, 1)) for a in grid)
    assert report(4, worst >= -1e-9, f"min PT eigenvalue on [1,4] = {worst:.3e}")


@crit(4)
def test_c04_choi_true_eigenvalue():
    # what the map actually gives; the quoted (3 - alpha)/2 is off by a factor of 21/2
    out = apply_map_one_sided(zoo.stormer(3.5).state, LinearMapSpec("choi"), (3, 3))
    val = eig_min(out)
    assert abs(val + 1 / 42) <= 1e-12


@crit(4)
@pytest.mark.xfail(
    strict=True,
    reason="Choi map on sigma(3.5) has minimum eigenvalue (3 - alpha)/21 = -1/42, "
    "not the quoted (3 - alpha)/2 = -0.25",
)
def test_c04_choi_eigenvalue_quoted():
    out = apply_map_one_sided(zoo.stormer(3.5).state, LinearMapSpec("choi"), (3, 3))
    val = eig_min(out)
    ok = abs(val + 0.25) <= 1e-9
    report(4, ok, f"min eigenvalue {val:.12f} vs quoted -0.25")
    assert ok


# -- 5 -------------------------------------------------------------------------------


@crit(5)
def test_c05_isotropic_schmidt_threshold():
    w3 = schmidt_witness(3, 3)
    step = 1e-3
    grid = 14.9 + step * np.arange(201)
    vals = np.array([evaluate_witness(w3, zoo.isotropic(3, b).state) for b in grid])
    neg = np.flatnonzero(vals < -1e-12)
    lo, hi = grid[neg[0] - 1], grid[neg[0]]
    # the sign flips inside one grid cell, and that cell contains 15
    ok = bool(np.all(vals[: neg[0]] >= -1e-12) and np.all(vals[neg[0]:] < 0)) and lo - 1e-12 <= 15 <= hi
    assert report(5, ok, f"sign change in [{lo:.4f}, {hi:.4f}]")


# -- 6 -------------------------------------------------------------------------------


WERNER_GRID = np.round(np.arange(-1.0, -0.05, 0.1), 10)


@pytest.fixture(scope="module")
def werner_scan():
    t0 = time.perf_counter()
    out = {b: distill_test_1copy(zoo.werner(3, b).state, 10_000, opt_steps=300, seed=1) for b in WERNER_GRID}
    return out, time.perf_counter() - t0


@crit(6)
def test_c06_werner_boundary_follows_one_plus_two_beta(werner_scan):
    scan, dt = werner_scan
    det = {b: v.detected for b, v in scan.items()}
    # 1-distillable exactly for beta < -1/2; at -1/2 the minimum is zero
    ok = all(det[b] == (b < -0.5) for b in WERNER_GRID)
    ok &= abs(scan[-0.5].min_value) <= 1e-9
    ok &= dt < 120
    assert report(6, ok, f"detected at {[b for b in WERNER_GRID if det[b]]} time={dt:.1f}s")


@crit(6)
def test_c06_werner_minimum_value():
    d, beta = 3, -0.6
    v = distill_test_1copy(zoo.werner(d, beta).state, 10_000, opt_steps=300, seed=1, stop_on_detect=False)
    expected = (1 + 2 * beta) / (d * d + beta * d)
    assert report(6, abs(v.min_value - expected) <= 1e-6, f"min={v.min_value:.10f} expected={expected:.10f}")


@crit(6)
@pytest.mark.xfail(
    strict=True,
    reason="beta=-0.5 sits on the 1-distillability boundary (projected minimum exactly 0), "
    "so the flip lies between -0.6 and -0.5, not between -0.5 and -0.4",
)
def test_c06_werner_flip_as_quoted(werner_scan):
    scan, _ = werner_scan
    ok = scan[-0.5].detected and not scan[-0.4].detected
    report(6, ok, "flip between -0.5 and -0.4")
    assert ok


# -- 7 -------------------------------------------------------------------------------


def _ppt_zoo():
    states = [zoo.chessboard().state, zoo.edge55().state, zoo.edge66().state, zoo.tiles_upb()[1].state]
    states += [zoo.stormer(a).state for a in np.round(np.arange(1.0, 4.01, 0.5), 10)]
    states += [zoo.werner(3, b).state for b in (-0.3, 0.0, 0.5)]
    states += [zoo.isotropic(3, b).state for b in (-1.0, 0.0, 1.0)]
    states.append(zoo.rainbow(3, 4, 0.01, 0.8).state)
    return states


@crit(7)
def test_c07_ppt_never_detected():
    states = _ppt_zoo()
    n_zoo = len(states)
    k = 0
    while len(states) < 1000:
        s = random_density((3, 3), seeding.rng(seeding.mix(77, k)))
        k += 1
        if is_ppt(s):
            states.append(s)
    hits = []
    for i, s in enumerate(states):
        tests, steps = (1000, 30) if i < n_zoo else (200, 0)
        v = distill_test_1copy(s, tests, opt_steps=steps, seed=i)
        if v.detected:
            hits.append(i)
    assert all(is_ppt(s) for s in states)
    assert report(7, not hits, f"{len(states)} PPT states ({n_zoo} from the zoo), detections={hits}")


# -- 8 -------------------------------------------------------------------------------


@crit(8)
@pytest.mark.parametrize("name, ranks", [("edge55", (5, 5)), ("edge66", (6, 6))])
def test_c08_edge_states(name, ranks):
    s = zoo.build(name).state
    ev = np.linalg.eigvalsh(s.matrix)
    evp = np.linalg.eigvalsh(partial_transpose(s, 1))
    got = (int(np.sum(ev > 1e-9)), int(np.sum(evp > 1e-9)))
    rn = trace_norm(realign(s))
    ok = got == ranks and evp.min() >= -1e-9 and rn > 1
    assert report(8, ok, f"{name} ranks={got} realignment={rn:.6f}")


# -- 9 -------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def volume_runs():
    t0 = time.perf_counter()
    runs = {
        "d3": volume_experiment(3, 10_000, 1000, opt_steps=300, seed=2024),
        "d7": volume_experiment(7, 1000, 1000, opt_steps=0, seed=2024),
        3: volume_experiment(3, 1000, 1000, opt_steps=300, seed=2024),
        4: volume_experiment(4, 1000, 1000, opt_steps=400, seed=2024),
        5: volume_experiment(5, 1000, 1000, opt_steps=500, seed=2024),
    }
    return runs, time.perf_counter() - t0


@crit(9)
@pytest.mark.slow
def test_c09_first_test_fractions(volume_runs):
    runs, dt = volume_runs
    f3, f7 = runs["d3"].first_test_fraction, runs["d7"].first_test_fraction
    ok = abs(f3 - 0.5) <= 0.1 and abs(f7 - 1 / 6) <= 0.1 and dt < 1800
    assert report(9, ok, f"d=3 first={f3:.4f} d=7 first={f7:.4f} time={dt:.0f}s")


@crit(9)
@pytest.mark.slow
@pytest.mark.xfail(
    strict=True,
    reason="at desk scale the undetected NPT fraction rises from d=3 to d=4 before falling; "
    "a stronger Nelder-Mead search confirms d=4 keeps more undetected states than d=3",
)
def test_c09_undetected_strictly_decreasing(volume_runs):
    runs, _ = volume_runs
    fr = [runs[d].frac_npt_undetected for d in (3, 4, 5)]
    ok = fr[0] > fr[1] > fr[2]
    report(9, ok, f"undetected fractions d=3,4,5: {[round(f, 4) for f in fr]}")
    assert ok


# -- 10 -------------------------------------------------------------------------------


@crit(10)
@pytest.mark.parametrize("d", [3, 4])
def test_c10_schmidt_robustness(d):
    p = max_entangled_projector(d)
    rho_g = (np.eye(d * d) - p) / (d * d - 1)
    worst = 0.0
    exact = True
    for n in range(1, d + 1):
        exact &= gen_schmidt_robustness_maxent(d, n) == pytest.approx((d - n) / n, abs=1e-15)
    for n in range(2, d):
        beta = gen_schmidt_robustness_maxent(d, n)
        mix = (p + beta * rho_g) / (1 + beta)
        worst = max(worst, abs(evaluate_witness(schmidt_witness(d, n + 1), QuantumState(mix, (d, d)))))
    assert report(10, exact and worst <= 1e-10, f"d={d} max |Tr(W rho)|={worst:.2e}")


# -- 11 -------------------------------------------------------------------------------


@crit(11)
def test_c11_worked_example():
    det = robustness_distill_details(zoo.robustness_example().state)
    target = np.array([1, 0, 0, 0, 1, 0, 0, 0, -1]) / np.sqrt(3)
    overlap = abs(np.vdot(target, det.eigenvector))
    ok = (
        abs(det.eigenvalue + 1 / 8) <= 1e-9
        and abs(overlap - 1) <= 1e-9
        and abs(det.bound - 1 / 15) <= 1e-9
        and det.distillable
    )
    assert report(11, ok, f"eigenvalue={det.eigenvalue:.12f} bound={det.bound:.12f}")


# -- 12 -------------------------------------------------------------------------------


def _cnot(control, target, n=4):
    u = np.zeros((2**n, 2**n))
    for x in range(2**n):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control]:
            bits[target] ^= 1
        u[sum(b << (n - 1 - q) for q, b in enumerate(bits)), x] = 1
    return u


@crit(12)
def test_c12_protocol_formulas():
    from scipy.optimize import brentq

    g = lambda y: recurrence_step(y) - y
    grid = np.linspace(0.4, 1.0, 601)
    vals = [g(y) for y in grid]
    roots = [brentq(g, a, b, xtol=1e-14) for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]) if fa * fb < 0]
    roots += [y for y, v in zip(grid, vals) if v == 0]
    roots = sorted(roots)
    fixed_ok = len(roots) == 2 and abs(roots[0] - 0.5) <= 1e-10 and abs(roots[1] - 1) <= 1e-10
    grow_ok = all(recurrence_step(y) > y for y in np.linspace(0.501, 0.999, 499))

    gen = np.random.default_rng(12)
    qpa_ok, n = True, 0
    while n < 1000:
        p = qpa_sort(gen.dirichlet(np.ones(4)))
        if p[0] <= 0.5:
            continue
        n += 1
        out = qpa_step(p)
        qpa_ok &= abs(out.sum() - 1) <= 1e-12 and out[0] > p[0]

    u = _cnot(0, 2) @ _cnot(1, 3)
    bxor_ok = True
    for i, j, k, l in itertools.product(range(2), repeat=4):
        v = np.kron(zoo.bell_vector(i, j), zoo.bell_vector(k, l))
        src, tgt = bxor_bell(BellIndex(i, j), BellIndex(k, l))
        w = np.kron(zoo.bell_vector(src.phase, src.shift), zoo.bell_vector(tgt.phase, tgt.shift))
        bxor_ok &= abs(abs(np.vdot(w, u @ v)) - 1) <= 1e-12

    breed_ok = breeding_yield([1, 0, 0, 0]).raw == 1.0
    ok = fixed_ok and grow_ok and qpa_ok and bxor_ok and breed_ok
    assert report(12, ok, f"fixed={fixed_ok} growth={grow_ok} qpa={qpa_ok} bxor={bxor_ok} breeding={breed_ok}")


# -- 13 -------------------------------------------------------------------------------


def _majorizes(x, y):
    n = max(len(x), len(y))
    xs = sorted(list(x) + [0.0] * (n - len(x)), reverse=True)
    ys = sorted(list(y) + [0.0] * (n - len(y)), reverse=True)
    return all(a >= b - 1e-12 for a, b in zip(itertools.accumulate(xs), itertools.accumulate(ys)))


@crit(13)
def test_c13_pure_state_laws():
    err = max(
        abs(max_conversion_prob([math.cos(t) ** 2, math.sin(t) ** 2], [0.5, 0.5]) - 2 * math.sin(t) ** 2)
        for t in np.linspace(0.01, math.pi / 4, 100)
    )
    gen = np.random.default_rng(13)
    disagree = 0
    for _ in range(1000):
        d = int(gen.integers(2, 6))
        s, t = gen.dirichlet(np.ones(d)), gen.dirichlet(np.ones(d))
        disagree += nielsen_feasible(s, t) != _majorizes(t, s)
    assert report(13, err <= 1e-12 and disagree == 0, f"max conversion error={err:.1e} disagreements={disagree}")


# -- 14 -------------------------------------------------------------------------------


@crit(14)
@pytest.mark.parametrize("d", [2, 3, 4])
def test_c14_jamiolkowski_round_trip(d):
    gen = np.random.default_rng(d)
    err = 0.0
    for _ in range(5):
        w = WitnessOperator(random_hermitian(d * d, gen), (d, d))
        err = max(err, np.abs(map_to_witness(witness_to_map(w), d).matrix - w.matrix).max())
    assert report(14, err <= 1e-10, f"round trip d={d} error={err:.1e}")


@crit(14)
@pytest.mark.parametrize("r", [2, 3])
def test_c14_transpose_invariance(r):
    gen = np.random.default_rng(100 + r)
    tau = global_transpose(r)
    err = 0.0
    for _ in range(20):
        s = random_state((2,) * r, gen)
        sigma = tuple(int(x) + 1 for x in gen.permutation(2 * r))
        a = criterion_value(s, PermutationCriterion.of(sigma, 2))
        b = criterion_value(s, PermutationCriterion.of(product(tau, sigma), 2))
        err = max(err, abs(a - b))
    assert report(14, err <= 1e-9, f"tau sigma invariance r={r} error={err:.1e}")


@crit(14)
def test_c14_rank_two_overlap_bounds():
    d = 3
    gen = np.random.default_rng(14)
    p = max_entangled_projector(d)
    q = np.eye(d * d) - p
    one = np.eye(d * d)
    worst = 0.0
    for _ in range(1000):
        # N = 1
        a = gen.standard_normal((2, d)) + 1j * gen.standard_normal((2, d))
        b = gen.standard_normal((2, d)) + 1j * gen.standard_normal((2, d))
        v = np.kron(a[0], b[0]) + np.kron(a[1], b[1])
        v /= np.linalg.norm(v)
        worst = max(worst, np.real(v.conj() @ p @ v) - 2 / d)
        worst = max(worst, (1 - 2 / d) - np.real(v.conj() @ q @ v))
        # N = 2, Schmidt rank 2 across A1 A2 | B1 B2, reordered to pairs (A1 B1)(A2 B2)
        a = gen.standard_normal((2, d * d)) + 1j * gen.standard_normal((2, d * d))
        b = gen.standard_normal((2, d * d)) + 1j * gen.standard_normal((2, d * d))
        v = np.kron(a[0], b[0]) + np.kron(a[1], b[1])
        v /= np.linalg.norm(v)
        t = v.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(-1)

        def ex(op):
            return np.real(t.conj() @ op @ t)

        worst = max(worst, ex(np.kron(one, p)) - 2 / d, ex(np.kron(p, p)) - 2 / d**2)
        worst = max(worst, ex(np.kron(q, p)) - 2 / d)
        worst = max(worst, (1 - 2 / d) ** 2 - ex(np.kron(q, q)))
    assert report(14, worst <= 1e-10, f"largest bound violation={worst:.2e}")


# -- 15 -------------------------------------------------------------------------------


@crit(15)
def test_c15_uuvvf_grid():
    d = 3
    mismatches, checked = [], 0
    for delta in (0.05, 0.1, 0.2, 0.3, 0.4):
        for eps in (-0.3, -0.25, -0.2, -0.1, 0.0):
            if not zoo.uuvvf_admissible(d, eps, delta):
                continue
            fp = zoo.uuvvf(d, eps, delta)
            v = distill_test_1copy(fp.state, 10_000, seed=7)
            checked += 1
            if bool(fp.flags["psi_b"]) != v.detected:
                mismatches.append((eps, delta))
    assert report(15, checked > 0 and not mismatches, f"{checked} grid points, mismatches={mismatches}")


@crit(15)
@pytest.mark.parametrize("eps", [-0.3, -0.2, -0.1])
def test_c15_watrous_recursion(eps):
    d = 3
    fp = zoo.watrous(d, eps)
    projected = zoo.project_two_copies(fp.state, (d, d))
    e2, _ = zoo.uuvvf_parameters(projected, d)
    expected = zoo.watrous_recursion(eps, d)
    assert report(15, abs(e2 - expected) <= 1e-9, f"eps={eps} projected={e2:.12f} formula={expected:.12f}")
