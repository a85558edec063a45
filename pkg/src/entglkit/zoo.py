"""Named states and symmetric families, with their analytic predicates.

Every constructor returns a :class:`FamilyPoint` whose ``state`` is trace
normalised.  The trace of the displayed unnormalised operator, where
there is one, is kept in ``params["norm"]``.

Four-factor families (UUVVF, Watrous, rainbow) live on two pairs.  Pair
1 is ``(A1, B1)`` and pair 2 is ``(A2, B2)``; ``A`` holds ``A1 A2`` and
``B`` holds ``B1 B2``.  The returned state is stored in the bipartite
order ``(A1 A2 | B1 B2)`` with dims ``(dA1 dA2, dB1 dB2)`` so that every
bipartite routine applies directly.  :func:`to_pair_order` and
:func:`from_pair_order` convert to and from the pair-by-pair layout
``(A1, B1, A2, B2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParamOutOfRange
from .qstate import (
    TAU_PSD,
    TAU_RANK,
    PureStateVector,
    QuantumState,
    basis_ket,
    is_ppt,
    kron,
    max_entangled_projector,
    partial_transpose,
    permute_subsystems,
    realign,
    swap_operator,
    trace_norm,
)

FAMILIES = (
    "werner",
    "isotropic",
    "stormer",
    "uuvvf",
    "watrous",
    "rainbow",
    "bell_diagonal",
    "chessboard",
    "tiles_upb",
    "edge55",
    "edge66",
    "max_correlated",
    "robustness_example",
)


@dataclass(frozen=True)
class FamilyPoint:
    family: str
    params: dict
    state: QuantumState
    flags: dict = field(default_factory=dict)


def _rank(m: np.ndarray, tol: float = TAU_RANK) -> int:
    return int(np.count_nonzero(np.linalg.eigvalsh(m) > tol))


# ------------------------------------------------------------ pair layouts


def to_pair_order(m: np.ndarray, pair_dims: Sequence[int]) -> np.ndarray:
    """``(A1 A2 | B1 B2)`` to ``(A1, B1, A2, B2)`` for pairs of sizes ``pair_dims``."""
    d1, d2 = pair_dims
    return permute_subsystems(m, (d1, d2, d1, d2), (0, 2, 1, 3))


def from_pair_order(m: np.ndarray, pair_dims: Sequence[int]) -> np.ndarray:
    d1, d2 = pair_dims
    return permute_subsystems(m, (d1, d1, d2, d2), (0, 2, 1, 3))


# --------------------------------------------------------- one-pair families


def werner(d: int, beta: float) -> FamilyPoint:
    """``(1 + beta F) / (d^2 + beta d)`` with ``-1 <= beta <= 1``."""
    if d < 2 or not -1.0 <= beta <= 1.0:
        raise ParamOutOfRange(f"werner needs d >= 2 and -1 <= beta <= 1, got d={d}, beta={beta}")
    op = np.eye(d * d) + beta * swap_operator(d)
    norm = d * d + beta * d
    st = QuantumState(op / norm, (d, d))
    flags = {"entangled": beta < -1.0 / d, "one_distillable": beta < -0.5}
    return FamilyPoint("werner", {"d": d, "beta": beta, "norm": norm}, st, flags)


def isotropic_schmidt_number(d: int, beta: float) -> int:
    """Schmidt number of ``1 + beta P_+`` on ``d x d``.

    Number ``n`` holds when ``d((n-1)d-1)/(d-n+1) < beta <= d(nd-1)/(d-n)``.
    """
    for n in range(1, d):
        if beta <= d * (n * d - 1) / (d - n):
            return n
    return d


def isotropic(d: int, beta: float) -> FamilyPoint:
    """``(1 + beta P_+) / (d^2 + beta)`` with ``P_+`` the unit-trace projector."""
    if d < 2 or beta < -1.0:
        raise ParamOutOfRange(f"isotropic needs d >= 2 and beta >= -1, got beta={beta}")
    op = np.eye(d * d) + beta * max_entangled_projector(d)
    norm = d * d + beta
    st = QuantumState(op / norm, (d, d))
    sn = isotropic_schmidt_number(d, beta)
    flags = {"schmidt_number": sn, "entangled": sn > 1}
    return FamilyPoint("isotropic", {"d": d, "beta": beta, "norm": norm}, st, flags)


def stormer(alpha: float) -> FamilyPoint:
    """``(1/7)[2 P_+ + alpha s_+ + (5 - alpha) s_-]`` on 3x3, ``0 <= alpha <= 5``."""
    if not 0.0 <= alpha <= 5.0:
        raise ParamOutOfRange(f"alpha must lie in [0, 5], got {alpha}")
    dims = (3, 3)
    sp = sum(
        np.outer(basis_ket(p, dims), basis_ket(p, dims)) for p in [(0, 1), (1, 2), (2, 0)]
    ) / 3.0
    f = swap_operator(3)
    sm = f @ sp @ f
    m = (2 * max_entangled_projector(3) + alpha * sp + (5 - alpha) * sm) / 7.0
    flags = {
        "ppt": 1.0 <= alpha <= 4.0,
        "separable": 2.0 <= alpha <= 3.0,
        "ppt_entangled": (1.0 <= alpha < 2.0) or (3.0 < alpha <= 4.0),
    }
    return FamilyPoint("stormer", {"alpha": alpha}, QuantumState(m, dims), flags)


_CHESSBOARD = [
    [1, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, -1, 0, -1, 0],
    [1, 0, 2, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, -1, 0, 1, 0],
    [0, 0, -1, 0, 1, 0, 1, 0, 0],
    [0, -1, 0, -1, 0, 2, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 2, 0, 0],
    [0, -1, 0, 1, 0, 0, 0, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
]

_EDGE55 = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, -1, 0, 0, 0, 0, 0, 1],
    [0, -1, 1, 0, 0, 0, 0, 0, -1],
    [0, 0, 0, 3, 0, -1, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0, 1, 1, 0, 0],
    [0, 0, 0, -1, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 2, -2],
    [0, 1, -1, 0, 0, 0, 0, -2, 3],
]

_EDGE66 = [
    [1, 0, 0, 0, 0, 0, 0, 0, -1],
    [0, 2, 0, -1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, -1, 0, 1, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, -1, 0],
    [0, 0, 1, 0, 1, 0, 2, 0, 0],
    [0, 0, 0, 0, 0, -1, 0, 1, 0],
    [-1, 0, 0, 1, 0, 0, 0, 0, 3],
]

_ROBUSTNESS_EXAMPLE = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 2, 0, 0],
    [0, -1, 0, 2, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 2, 0, 2, 0],
    [0, 0, 2, 0, 0, 0, 2, 0, 0],
    [0, 0, 0, 0, 0, 2, 0, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2],
]


def _fixed(name: str, rows, denom: float, extra_flags: dict | None = None) -> FamilyPoint:
    m = np.array(rows, dtype=complex) / denom
    st = QuantumState(m, (3, 3))
    ptm = partial_transpose(st, 1)
    flags = {
        "ppt": is_ppt(st),
        "rank": _rank(st.matrix),
        "rank_pt": _rank(ptm),
        "realignment_norm": trace_norm(realign(st)),
    }
    flags.update(extra_flags or {})
    return FamilyPoint(name, {"norm": denom}, st, flags)


def chessboard() -> FamilyPoint:
    """Chessboard bound entangled state on 3x3 (matrix over 12)."""
    return _fixed("chessboard", _CHESSBOARD, 12.0)


def edge55() -> FamilyPoint:
    """PPT edge state with rank 5 and partial-transpose rank 5 (matrix over 13)."""
    return _fixed("edge55", _EDGE55, 13.0)


def edge66() -> FamilyPoint:
    """PPT edge state with rank 6 and partial-transpose rank 6 (matrix over 13)."""
    return _fixed("edge66", _EDGE66, 13.0)


def robustness_example() -> FamilyPoint:
    """NPT 3x3 state whose distillability follows from the Schmidt-robustness bound (over 16)."""
    return _fixed("robustness_example", _ROBUSTNESS_EXAMPLE, 16.0)


def tiles_vectors() -> list[PureStateVector]:
    s2 = np.sqrt(2.0)
    e = [basis_ket([i], [3]) for i in range(3)]
    pairs = [
        (e[0], (e[0] - e[1]) / s2),
        ((e[0] - e[1]) / s2, e[2]),
        (e[2], (e[1] - e[2]) / s2),
        ((e[1] - e[2]) / s2, e[0]),
    ]
    u = (e[0] + e[1] + e[2]) / np.sqrt(3.0)
    pairs.append((u, u))
    return [PureStateVector(np.kron(a, b), 3, 3) for a, b in pairs]


def tiles_upb() -> tuple[list[PureStateVector], FamilyPoint]:
    """The five-vector Tiles UPB and the PPT entangled state ``(1 - sum P_j)/4``.

    The fifth vector is the uniform superposition on each side, scaled to
    unit norm.
    """
    vecs = tiles_vectors()
    proj = sum(v.projector() for v in vecs)
    st = QuantumState((np.eye(9) - proj) / 4.0, (3, 3))
    flags = {"ppt": is_ppt(st), "rank": _rank(st.matrix), "entangled": True}
    return vecs, FamilyPoint("tiles_upb", {"norm": 4.0}, st, flags)


def bell_vector(phase: int, shift: int) -> np.ndarray:
    """``|B_ij> = (|0 j> + (-1)^i |1, 1 xor j>) / sqrt 2``."""
    v = basis_ket([0, shift], [2, 2]) + (-1) ** phase * basis_ket([1, 1 ^ shift], [2, 2])
    return v / np.sqrt(2.0)


BELL_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


def bell_diagonal(p: Sequence[float]) -> FamilyPoint:
    """``sum p_ij |B_ij><B_ij|`` with ``p`` ordered ``(p00, p01, p10, p11)``."""
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ParamOutOfRange(f"bell_diagonal needs four probabilities summing to 1, got {p}")
    m = sum(pk * np.outer(bell_vector(*ij), bell_vector(*ij)) for pk, ij in zip(p, BELL_ORDER))
    params = {f"p{i}{j}": float(pk) for pk, (i, j) in zip(p, BELL_ORDER)}
    flags = {"entangled": bool(p.max() > 0.5)}
    return FamilyPoint("bell_diagonal", params, QuantumState(m, (2, 2)), flags)


def max_correlated(a: np.ndarray) -> FamilyPoint:
    """``sum_ij a_ij |ii><jj|`` for a PSD unit-trace coefficient matrix ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        d = int(round(np.sqrt(a.size)))
        if d * d != a.size:
            raise ParamOutOfRange(f"{a.size} coefficients do not form a square matrix")
        a = a.reshape(d, d)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ParamOutOfRange("coefficient matrix must be square")
    d = a.shape[0]
    m = np.zeros((d * d, d * d), dtype=complex)
    idx = np.arange(d) * (d + 1)
    m[np.ix_(idx, idx)] = a
    st = QuantumState(m, (d, d))
    return FamilyPoint("max_correlated", {"d": d}, st, {})


# ------------------------------------------------------------- two-pair families


def _pair_invariant_operator(d1: int, d2: int, c0, c1, c2, c12) -> np.ndarray:
    """``c0 1 + c1 F_1 (x) 1 + c2 1 (x) F_2 + c12 F_1 (x) F_2`` in bipartite order."""
    f1, f2 = swap_operator(d1), swap_operator(d2)
    i1, i2 = np.eye(d1 * d1), np.eye(d2 * d2)
    op = c0 * kron(i1, i2) + c1 * kron(f1, i2) + c2 * kron(i1, f2) + c12 * kron(f1, f2)
    return from_pair_order(op, (d1, d2))


def uuvvf_admissible(d: int, eps: float, delta: float) -> bool:
    return (
        (d - 1) ** 2 + 2 * eps * d * (d - 1) + delta * d * d >= 0
        and d * d - 1 + 2 * eps * d - delta * d * d >= 0
        and (d + 1) ** 2 - 2 * eps * d * (d + 1) + delta * d * d >= 0
    )


def uuvvf_flags(d: int, eps: float, delta: float) -> dict:
    psi_a = d * d + 3 * d * (eps * d - 1) + 2 * (1 - 2 * eps * d + delta * d * d) < 0
    psi_b = eps < 1.0 / d - 0.5
    psi_c = delta < 1.0 / d**2 - 0.5
    return {
        "entangled": eps < 0 or delta < 0,
        "separable": eps >= 0 and delta >= 0,
        "psi_a": bool(psi_a),
        "psi_b": bool(psi_b),
        "psi_c": bool(psi_c),
        "one_distillable": bool(psi_a or psi_b or psi_c),
    }


def uuvvf(d: int, eps: float, delta: float) -> FamilyPoint:
    """Two-pair ``UUVVF``-invariant state.

    Unnormalised operator::

        1 (x) 1 + ((eps d - 1)/d)(1 (x) F + F (x) 1) + ((1 - 2 eps d + delta d^2)/d^2) F (x) F
    """
    if d < 2 or not uuvvf_admissible(d, eps, delta):
        raise ParamOutOfRange(f"(eps, delta) = ({eps}, {delta}) is not admissible for d={d}")
    c1 = (eps * d - 1) / d
    c12 = (1 - 2 * eps * d + delta * d * d) / (d * d)
    op = _pair_invariant_operator(d, d, 1.0, c1, c1, c12)
    norm = float(np.trace(op).real)
    st = QuantumState(op / norm, (d * d, d * d))
    params = {"d": d, "eps": eps, "delta": delta, "norm": norm, "pair_dims": (d, d)}
    return FamilyPoint("uuvvf", params, st, uuvvf_flags(d, eps, delta))


def watrous_delta(d: int, eps: float) -> float:
    """``delta`` on the slice ``1 - 2 eps d + delta d^2 = d^2``."""
    return (d * d - 1 + 2 * eps * d) / (d * d)


def watrous(d: int, eps: float) -> FamilyPoint:
    """``1 + ((eps d - 1)/d)(1 (x) F + F (x) 1) + F (x) F`` for ``1/d - 1 < eps < 1 + 1/d``."""
    if d < 2 or not 1.0 / d - 1.0 < eps < 1.0 + 1.0 / d:
        raise ParamOutOfRange(f"eps={eps} outside (1/d - 1, 1 + 1/d)")
    c1 = (eps * d - 1) / d
    op = _pair_invariant_operator(d, d, 1.0, c1, c1, 1.0)
    norm = float(np.trace(op).real)
    st = QuantumState(op / norm, (d * d, d * d))
    params = {
        "d": d,
        "eps": eps,
        "delta": watrous_delta(d, eps),
        "norm": norm,
        "pair_dims": (d, d),
    }
    flags = {"entangled": eps < 0, "one_distillable": eps < 1.0 / d - 0.5}
    return FamilyPoint("watrous", params, st, flags)


def uuvvf_two_copy_recursion(eps: float, delta: float, d: int) -> tuple[float, float]:
    """Parameters after projecting two copies with ``P_{15} (x) P_{26}``."""
    den = d * d * eps * eps + d * d - 1
    eps_new = eps * (d * d * delta + d * d - 1) / den
    delta_new = (eps * eps * (d * d - 1) + d * d * delta * delta) / den
    return eps_new, delta_new


def watrous_recursion(eps: float, d: int) -> float:
    return eps * 2 * (eps * d + d * d - 1) / (d * d * eps * eps + d * d - 1)


def project_two_copies(s: QuantumState, pair_dims: Sequence[int]) -> np.ndarray:
    """Project pair 1 of two copies onto ``P_+`` on both sides.

    For copies ``rho_{A1 B1 A2 B2}`` and ``rho_{A1' B1' A2' B2'}`` the
    result is ``<Phi_{A1 A1'} Phi_{B1 B1'}| rho (x) rho |Phi Phi>``, an
    unnormalised operator on pairs ``(A2, B2)`` and ``(A2', B2')`` returned
    in bipartite order ``(A2 A2' | B2 B2')``.
    """
    d1, d2 = pair_dims
    t = to_pair_order(s.matrix, pair_dims).reshape((d1, d1, d2, d2) * 2)
    # t[a1, b1, a2, b2, a1', b1', a2', b2']
    out = np.einsum("ijabklcd,ijefklgh->abefcdgh", t, t) / (d1 * d1)
    out = out.reshape((d2 * d2) ** 2, (d2 * d2) ** 2)
    return from_pair_order(out, (d2, d2))


def pair_invariant_coefficients(op: np.ndarray, pair_dims: Sequence[int]) -> np.ndarray:
    """Least-squares coefficients of ``op`` on ``(1, F_1, F_2, F_1 F_2)``."""
    d1, d2 = pair_dims
    basis = [
        _pair_invariant_operator(d1, d2, *row)
        for row in np.eye(4)
    ]
    gram = np.array([[np.vdot(a, b).real for b in basis] for a in basis])
    rhs = np.array([np.vdot(a, op).real for a in basis])
    return np.linalg.solve(gram, rhs)


def uuvvf_parameters(op: np.ndarray, d: int) -> tuple[float, float]:
    """Recover ``(eps, delta)`` from an (unnormalised) ``UUVVF``-invariant operator."""
    c0, c1, c2, c12 = pair_invariant_coefficients(op, (d, d))
    a = 0.5 * (c1 + c2) / c0
    b = c12 / c0
    eps = (a * d + 1) / d
    delta = (b * d * d - 1 + 2 * eps * d) / (d * d)
    return float(eps), float(delta)


def rainbow_eigenvalues(m: int, d: int, eps: float, delta: float) -> dict:
    """Eigenvalues of the unnormalised rainbow operator on the four symmetry sectors."""
    a = (d * eps - 1) / d
    b = (m * eps - 1) / m
    c = (1 - (m + d) * eps + d * m * delta) / (d * m)
    return {
        (sm, sd): 1 + a * sd + b * sm + c * sm * sd for sm in (1, -1) for sd in (1, -1)
    }


def rainbow_listed_inequalities(m: int, d: int, eps: float, delta: float) -> bool:
    """The three admissibility inequalities as usually quoted for the rainbow family."""
    md = m * d
    return (
        1 + delta + 2 * eps + 1 / md - (eps + 1) * (m + d) / md >= 0
        and 1 - 1 / md + eps * (m + d) / md - delta + 1 / m - 1 / d >= 0
        and 1 + delta - 2 * eps + 1 / md + (1 - eps) * (m + d) / md >= 0
    )


def rainbow_admissible(m: int, d: int, eps: float, delta: float) -> bool:
    """Positivity on all four sectors (strictly stronger than the quoted three when m < d)."""
    return min(rainbow_eigenvalues(m, d, eps, delta).values()) >= -TAU_PSD


def rainbow_flags(m: int, d: int, eps: float, delta: float) -> dict:
    npt = eps < 0 or delta < 0
    wit = eps * m * m * (d * d - 1) + d * m * delta * (m - d) < 0
    psi1 = (
        2
        + 2 * (d * eps - 1) / d
        + 4 * (m * eps - 1) / m
        + 4 * (1 - (m + d) * eps + d * m * delta) / (m * d)
        < 0
    )
    psi2 = eps < 1.0 / m - 0.5
    return {
        "npt": npt,
        "witness_negative": bool(wit),
        "ppt_entangled": bool(wit and not npt),
        "psi_1": bool(psi1),
        "psi_2": bool(psi2),
        "one_distillable": bool(psi1 or psi2),
    }


def rainbow(m: int, d: int, eps: float, delta: float) -> FamilyPoint:
    """Rainbow state: pair 1 has local dimension ``d``, pair 2 local dimension ``m``.

    Unnormalised operator, with ``F_d`` on pair 1 and ``F_m`` on pair 2::

        1 + ((d eps - 1)/d) F_d + ((m eps - 1)/m) F_m + ((1 - (m+d) eps + d m delta)/(d m)) F_m F_d
    """
    if not 3 <= m < d:
        raise ParamOutOfRange(f"rainbow needs 3 <= m < d, got m={m}, d={d}")
    if not rainbow_admissible(m, d, eps, delta):
        raise ParamOutOfRange(f"(eps, delta) = ({eps}, {delta}) gives a non-positive operator")
    a = (d * eps - 1) / d
    b = (m * eps - 1) / m
    c = (1 - (m + d) * eps + d * m * delta) / (d * m)
    op = _pair_invariant_operator(d, m, 1.0, a, b, c)
    norm = float(np.trace(op).real)
    st = QuantumState(op / norm, (d * m, d * m))
    params = {"m": m, "d": d, "eps": eps, "delta": delta, "norm": norm, "pair_dims": (d, m)}
    return FamilyPoint("rainbow", params, st, rainbow_flags(m, d, eps, delta))


def rainbow_witness(m: int, d: int) -> np.ndarray:
    """Witness ``(1 - F_d/m) (x) F_m``, negative on the PPT entangled rainbow states."""
    return _pair_invariant_operator(d, m, 0.0, 0.0, 1.0, -1.0 / m)


# ------------------------------------------------------------------ dispatcher


def build(family: str, **params) -> FamilyPoint:
    """Construct a family point by name (used by the command-line front end)."""
    family = family.lower()
    if family == "werner":
        return werner(int(params["d"]), float(params["beta"]))
    if family == "isotropic":
        return isotropic(int(params["d"]), float(params["beta"]))
    if family == "stormer":
        return stormer(float(params["alpha"]))
    if family == "uuvvf":
        return uuvvf(int(params["d"]), float(params["eps"]), float(params["delta"]))
    if family == "watrous":
        return watrous(int(params["d"]), float(params["eps"]))
    if family == "rainbow":
        return rainbow(
            int(params["m"]), int(params["d"]), float(params["eps"]), float(params["delta"])
        )
    if family == "bell_diagonal":
        return bell_diagonal([float(x) for x in params["p"]])
    if family == "chessboard":
        return chessboard()
    if family == "tiles_upb":
        return tiles_upb()[1]
    if family == "edge55":
        return edge55()
    if family == "edge66":
        return edge66()
    if family == "robustness_example":
        return robustness_example()
    if family == "max_correlated":
        return max_correlated(np.asarray(params["a"]))
    raise ParamOutOfRange(f"unknown family {family!r}")
