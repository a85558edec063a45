import numpy as np
import pytest
from numpy.testing import assert_allclose

from entglkit import zoo
from entglkit.errors import ParamOutOfRange
from entglkit.montecarlo import haar_unitary
from entglkit.qstate import (
    is_ppt,
    max_entangled_projector,
    min_eigenvalue,
    partial_transpose,
    realign,
    swap_operator,
    trace_norm,
)
from entglkit.witness import evaluate_witness, schmidt_witness


def assert_valid(fp):
    m = fp.state.matrix
    assert_allclose(m, m.conj().T, atol=1e-12)
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-12)
    assert min_eigenvalue(m) >= -1e-9


ALL_POINTS = [
    zoo.werner(3, -0.6),
    zoo.isotropic(3, 5.0),
    zoo.stormer(3.5),
    zoo.chessboard(),
    zoo.tiles_upb()[1],
    zoo.edge55(),
    zoo.edge66(),
    zoo.robustness_example(),
    zoo.bell_diagonal([0.7, 0.1, 0.1, 0.1]),
    zoo.uuvvf(3, -0.2, 0.1),
    zoo.watrous(3, -0.2),
    zoo.rainbow(3, 4, 0.01, 0.8),
    zoo.max_correlated(np.diag([0.5, 0.3, 0.2])),
]


@pytest.mark.parametrize("fp", ALL_POINTS, ids=lambda fp: fp.family)
def test_every_constructor_gives_a_state(fp):
    assert_valid(fp)


# -- Werner & isotropic -----------------------------------------------------------


def test_werner_examples():
    w = zoo.werner(2, -1.0)
    assert np.trace(w.state.matrix @ swap_operator(2)).real == pytest.approx(-1)
    w = zoo.werner(3, -0.4)
    assert w.flags["entangled"] and not w.flags["one_distillable"]
    assert zoo.werner(3, -0.6).flags["one_distillable"]
    w = zoo.werner(3, 0.0)
    assert_allclose(w.state.matrix, np.eye(9) / 9)
    assert not w.flags["entangled"]


@pytest.mark.parametrize("beta", [-1.1, 1.5])
def test_werner_range(beta):
    with pytest.raises(ParamOutOfRange):
        zoo.werner(3, beta)


def test_werner_entangled_iff_npt():
    for beta in np.linspace(-1, 1, 41):
        fp = zoo.werner(3, beta)
        assert fp.flags["entangled"] == (not is_ppt(fp.state))


def test_werner_twirl_invariance():
    gen = np.random.default_rng(7)
    w = zoo.werner(3, -0.7).state.matrix
    iso = zoo.isotropic(3, 2.0).state.matrix
    for _ in range(100):
        u = haar_unitary(3, gen)
        uu = np.kron(u, u)
        assert np.abs(uu @ w @ uu.conj().T - w).max() <= 1e-9
        uc = np.kron(u, u.conj())
        assert np.abs(uc @ iso @ uc.conj().T - iso).max() <= 1e-9


def test_werner_partial_transpose_is_isotropic():
    d, beta = 3, -0.6
    pt = partial_transpose(zoo.werner(d, beta).state, 1)
    # (1 + beta F)^{T_B} = 1 + beta d P_+
    oracle = (np.eye(d * d) + beta * d * max_entangled_projector(d)) / (d * d + beta * d)
    assert_allclose(pt, oracle, atol=1e-14)


def test_isotropic_schmidt_numbers():
    assert zoo.isotropic(3, 15.0).flags["schmidt_number"] == 2
    assert zoo.isotropic(3, 15.0 + 1e-6).flags["schmidt_number"] == 3
    fp = zoo.isotropic(3, 0.0)
    assert fp.flags["schmidt_number"] == 1
    assert_allclose(fp.state.matrix, np.eye(9) / 9)
    with pytest.raises(ParamOutOfRange):
        zoo.isotropic(3, -1.5)


@pytest.mark.parametrize("d", [3, 4])
def test_isotropic_flags_match_schmidt_witnesses(d):
    for beta in np.linspace(-1, 4 * d * d, 400):
        fp = zoo.isotropic(d, beta)
        sn = fp.flags["schmidt_number"]
        for n in range(1, d):
            val = evaluate_witness(schmidt_witness(d, n + 1), fp.state)
            # sign flips exactly at the threshold where the Schmidt number exceeds n
            if abs(val) > 1e-12:
                assert (val < 0) == (sn > n)


def test_rank_two_overlap_against_isotropic_projector():
    gen = np.random.default_rng(3)
    d = 3
    p = max_entangled_projector(d)
    for _ in range(300):
        # Schmidt rank 2 across (A1 A2 | B1 B2)
        a = gen.standard_normal((2, d * d)) + 1j * gen.standard_normal((2, d * d))
        b = gen.standard_normal((2, d * d)) + 1j * gen.standard_normal((2, d * d))
        v = np.kron(a[0], b[0]) + np.kron(a[1], b[1])
        v /= np.linalg.norm(v)
        t = v.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(-1)  # (A1 B1 A2 B2)
        one = np.real(t.conj() @ np.kron(p, np.eye(d * d)) @ t)
        two = np.real(t.conj() @ np.kron(p, p) @ t)
        assert one <= 2 / d + 1e-10
        assert two <= 2 / d**2 + 1e-10


# -- fixed states -------------------------------------------------------------------


def test_stormer_regions():
    assert zoo.stormer(2.5).flags["ppt"] and zoo.stormer(2.5).flags["separable"]
    assert is_ppt(zoo.stormer(2.5).state)
    assert not is_ppt(zoo.stormer(0.5).state)
    for alpha in np.round(np.arange(0, 5.0001, 0.1), 10):
        fp = zoo.stormer(alpha)
        assert is_ppt(fp.state) == (1 <= alpha <= 4) == fp.flags["ppt"]
    with pytest.raises(ParamOutOfRange):
        zoo.stormer(5.5)


def test_chessboard():
    fp = zoo.chessboard()
    assert fp.flags["ppt"]
    assert trace_norm(realign(fp.state)) == pytest.approx(7 / 6, abs=1e-9)


def test_tiles():
    vecs, fp = zoo.tiles_upb()
    gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in vecs] for a in vecs])
    assert_allclose(gram, np.eye(5), atol=1e-14)
    assert fp.flags["rank"] == 4 and fp.flags["ppt"]
    for v in vecs:
        assert np.real(v.amplitudes.conj() @ fp.state.matrix @ v.amplitudes) == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("fp, ranks", [(zoo.edge55(), (5, 5)), (zoo.edge66(), (6, 6))])
def test_edge_states(fp, ranks):
    assert (fp.flags["rank"], fp.flags["rank_pt"]) == ranks
    assert fp.flags["ppt"]
    assert fp.flags["realignment_norm"] > 1


def test_bell_diagonal():
    assert_allclose(zoo.bell_diagonal([1, 0, 0, 0]).state.matrix, max_entangled_projector(2), atol=1e-15)
    assert_allclose(zoo.bell_diagonal([0.25] * 4).state.matrix, np.eye(4) / 4, atol=1e-15)
    p = [0.4, 0.3, 0.2, 0.1]
    s = zoo.bell_diagonal(p).state
    assert np.trace(s.matrix @ max_entangled_projector(2)).real == pytest.approx(0.4)
    with pytest.raises(ParamOutOfRange):
        zoo.bell_diagonal([0.5, 0.5, 0.5, -0.5])


def test_bell_vectors_orthonormal():
    b = np.array([zoo.bell_vector(*ij) for ij in zoo.BELL_ORDER])
    assert_allclose(b @ b.conj().T, np.eye(4), atol=1e-15)


# -- two-pair families ----------------------------------------------------------------


def test_uuvvf_reproduces_two_werner_pairs():
    d, beta = 3, -0.5
    w = zoo.werner(d, beta).state.matrix
    # 1 + beta F matches the pair coefficient (eps d - 1)/d
    eps = beta + 1 / d
    fp = zoo.uuvvf(d, eps, eps * eps)
    assert_allclose(zoo.to_pair_order(fp.state.matrix, (d, d)), np.kron(w, w), atol=1e-14)


def test_uuvvf_flags():
    fp = zoo.uuvvf(3, -0.2, 0.1)
    assert fp.flags["entangled"] and fp.flags["psi_b"] and fp.flags["one_distillable"]
    fp = zoo.uuvvf(3, 0.1, 0.1)
    assert fp.flags["separable"] and not fp.flags["entangled"]
    with pytest.raises(ParamOutOfRange):
        zoo.uuvvf(3, -0.9, 0.9)


def test_uuvvf_parameters_recovered():
    for eps, delta in [(-0.2, 0.1), (0.3, 0.05), (0.0, -0.1)]:
        fp = zoo.uuvvf(3, eps, delta)
        assert zoo.uuvvf_parameters(fp.state.matrix, 3) == pytest.approx((eps, delta), abs=1e-12)


def test_watrous_flags():
    fp = zoo.watrous(3, -0.2)
    assert fp.flags["entangled"]
    # -0.2 < 1/3 - 1/2, so the 1-distillability flag is set
    assert fp.flags["one_distillable"]
    fp = zoo.watrous(3, -0.1)
    assert fp.flags["entangled"] and not fp.flags["one_distillable"]
    fp = zoo.watrous(3, 0.0)
    assert not fp.flags["entangled"]
    with pytest.raises(ParamOutOfRange):
        zoo.watrous(3, -0.7)


def test_watrous_lies_on_slice():
    d, eps = 3, -0.25
    fp = zoo.watrous(d, eps)
    delta = fp.params["delta"]
    assert 1 - 2 * eps * d + delta * d * d == pytest.approx(d * d)
    assert_allclose(fp.state.matrix, zoo.uuvvf(d, eps, delta).state.matrix, atol=1e-15)


def test_watrous_recursion_matches_slice_formula():
    d = 3
    for eps in (-0.5, -0.3, -0.1, 0.2):
        delta = zoo.watrous_delta(d, eps)
        e2, _ = zoo.uuvvf_two_copy_recursion(eps, delta, d)
        assert e2 == pytest.approx(zoo.watrous_recursion(eps, d), abs=1e-14)


def test_watrous_recursion_deepens_entanglement():
    d, eps = 3, -0.1
    for _ in range(5):
        new = zoo.watrous_recursion(eps, d)
        assert new < eps
        eps = new


@pytest.mark.parametrize("eps", [-0.3, -0.2, -0.1])
def test_recursion_matches_numerical_projection(eps):
    d = 3
    fp = zoo.watrous(d, eps)
    out = zoo.project_two_copies(fp.state, (d, d))
    got = zoo.uuvvf_parameters(out, d)
    e2, dl2 = zoo.uuvvf_two_copy_recursion(eps, fp.params["delta"], d)
    assert got[0] == pytest.approx(e2, abs=1e-9)
    assert got[1] == pytest.approx(dl2, abs=1e-9)
    # the projected operator stays on the invariant family
    coeffs = zoo.pair_invariant_coefficients(out, (d, d))
    rebuilt = zoo._pair_invariant_operator(d, d, *coeffs)
    assert np.abs(rebuilt - out).max() <= 1e-12


def test_uuvvf_recursion_fixed_ray():
    d, delta = 3, 0.1
    e2, dl2 = zoo.uuvvf_two_copy_recursion(0.0, delta, d)
    assert e2 == 0.0
    assert dl2 == pytest.approx(d * d * delta * delta / (d * d - 1))


# -- rainbow ----------------------------------------------------------------------------


def test_rainbow_trivial_point():
    fp = zoo.rainbow(3, 4, 0.0, 0.0)
    assert is_ppt(fp.state)
    assert not fp.flags["npt"] and not fp.flags["ppt_entangled"]


def test_rainbow_listed_point_is_not_a_state():
    # satisfies the quoted inequalities but one symmetry sector is negative
    assert zoo.rainbow_listed_inequalities(3, 4, 0.01, 1.0)
    assert min(zoo.rainbow_eigenvalues(3, 4, 0.01, 1.0).values()) < 0
    with pytest.raises(ParamOutOfRange):
        zoo.rainbow(3, 4, 0.01, 1.0)


def test_rainbow_ppt_entangled_point():
    fp = zoo.rainbow(3, 4, 0.01, 0.8)
    assert fp.flags["ppt_entangled"]
    assert is_ppt(fp.state)
    assert evaluate_witness(zoo.rainbow_witness(3, 4), fp.state) < 0


def test_rainbow_witness_on_separable_grid():
    # nonnegative on the separable corner eps, delta >= 0 away from the flagged region
    for eps in np.linspace(0, 0.5, 6):
        for delta in np.linspace(0, 0.5, 6):
            if not zoo.rainbow_admissible(3, 4, eps, delta):
                continue
            fp = zoo.rainbow(3, 4, eps, delta)
            val = evaluate_witness(zoo.rainbow_witness(3, 4), fp.state)
            assert (val < -1e-12) == fp.flags["witness_negative"]


def test_rainbow_npt_grid():
    for eps in np.linspace(-0.6, 0.6, 13):
        for delta in np.linspace(-0.6, 0.9, 16):
            if not zoo.rainbow_admissible(3, 4, eps, delta):
                continue
            fp = zoo.rainbow(3, 4, eps, delta)
            npt = min_eigenvalue(partial_transpose(fp.state, 1)) < -1e-10
            if abs(eps) > 1e-12 and abs(delta) > 1e-12:
                assert npt == fp.flags["npt"]


def test_rainbow_range():
    with pytest.raises(ParamOutOfRange):
        zoo.rainbow(4, 3, 0.0, 0.0)


# -- dispatcher --------------------------------------------------------------------------


def test_build_dispatch():
    assert zoo.build("werner", d=3, beta=-0.6).family == "werner"
    assert zoo.build("tiles_upb").family == "tiles_upb"
    assert zoo.build("bell_diagonal", p=[1, 0, 0, 0]).family == "bell_diagonal"
    with pytest.raises(ParamOutOfRange):
        zoo.build("nope")


def test_max_correlated():
    fp = zoo.max_correlated(np.full((2, 2), 0.5))
    assert_allclose(fp.state.matrix, max_entangled_projector(2), atol=1e-15)
