"""Positive maps, entanglement and Schmidt-number witnesses.

Maps act on the trailing two axes of an array, so a stack of blocks can
be processed in one call.  The Jamiolkowski correspondence used here is

    W = sum_ij |i><j| (x) Lambda(|i><j|),   <k|Lambda(|i><j|)|l> = <ik|W|jl>,

i.e. ``W = d (1 (x) Lambda)(P_+)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidOrder,
    NotBipartite,
    NotSquare,
    NotUnitVector,
    ParamOutOfRange,
    WrongDimension,
)
from .qstate import (
    TAU_HERM,
    QuantumState,
    is_hermitian,
    kron,
    max_entangled_projector,
    partial_transpose_matrix,
    permute_subsystems,
)

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


# -------------------------------------------------------------- structured maps


def _square_tail(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise NotSquare(f"expected square matrices, got shape {a.shape}")
    return a.shape[-1]


def _eye_like(a: np.ndarray, d: int) -> np.ndarray:
    return np.broadcast_to(np.eye(d), a.shape).astype(complex)


def _trace(a: np.ndarray) -> np.ndarray:
    return np.trace(a, axis1=-2, axis2=-1)[..., None, None]


def _diag(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    return a * np.eye(d)


def _t(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def reduction_like_map(which, a: np.ndarray) -> np.ndarray:
    """The five reduction-like maps, numbered 1 to 5.

    1. ``Tr(A) 1 - A``
    2. ``Tr(A) 1 + A - 2 diag(A)``
    3. ``A^T + (d - 2) diag(A)``
    4. ``-A^T + d diag(A)``
    5. ``(d - 2) Tr(A) 1 + (2d - 1) A^T``
    """
    a = np.asarray(a, dtype=complex)
    d = _square_tail(a)
    k = int(str(which).lstrip("LΛlambda_"))
    if k == 1:
        return _trace(a) * np.eye(d) - a
    if k == 2:
        return _trace(a) * np.eye(d) + a - 2 * _diag(a)
    if k == 3:
        return _t(a) + (d - 2) * _diag(a)
    if k == 4:
        return -_t(a) + d * _diag(a)
    if k == 5:
        return (d - 2) * _trace(a) * np.eye(d) + (2 * d - 1) * _t(a)
    raise ParamOutOfRange(f"no reduction-like map number {which!r}")


def choi_map(a: np.ndarray) -> np.ndarray:
    """Choi's indecomposable positive map on 3x3 matrices.

    Off-diagonal entries change sign; the diagonal becomes
    ``(A11 + A33, A22 + A11, A33 + A22)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-2:] != (3, 3):
        raise WrongDimension(f"Choi's map acts on 3x3 matrices, got {a.shape[-2:]}")
    out = -a.copy()
    out[..., 0, 0] = a[..., 0, 0] + a[..., 2, 2]
    out[..., 1, 1] = a[..., 1, 1] + a[..., 0, 0]
    out[..., 2, 2] = a[..., 2, 2] + a[..., 1, 1]
    return out


def _kraus_apply(kraus, a: np.ndarray) -> np.ndarray:
    out = None
    for w, k in kraus:
        term = w * (k @ a @ k.conj().T)
        out = term if out is None else out + term
    return out


_STRUCTURED: dict[str, Callable[[np.ndarray, dict], np.ndarray]] = {
    "identity": lambda a, p: a.copy(),
    "transpose": lambda a, p: _t(a).copy(),
    "reduction": lambda a, p: reduction_like_map(1, a),
    "diag_plus": lambda a, p: reduction_like_map(2, a),
    "diag_transpose_plus": lambda a, p: reduction_like_map(3, a),
    "diag_transpose_minus": lambda a, p: reduction_like_map(4, a),
    "isotropic_sum": lambda a, p: reduction_like_map(5, a),
    "choi": lambda a, p: choi_map(a),
    "reduction_p": lambda a, p: _trace(a) * np.eye(a.shape[-1]) - p["p"] * a,
}


@dataclass(frozen=True)
class LinearMapSpec:
    """A linear map on square matrices, either named or given by weighted Kraus terms.

    ``kind`` is one of the structured names (``identity``, ``transpose``,
    ``reduction``, ``diag_plus``, ``diag_transpose_plus``,
    ``diag_transpose_minus``, ``isotropic_sum``, ``choi``, ``reduction_p``)
    or ``custom_kraus``.  For ``custom_kraus`` the map is
    ``A -> sum_k w_k K_k A K_k^dagger`` with real weights ``w_k`` (usually
    +1 or -1).
    """

    kind: str
    kraus: tuple = field(default=(), repr=False)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "custom_kraus":
            if not self.kraus:
                raise ParamOutOfRange("custom_kraus needs at least one operator")
            shapes = {np.asarray(k).shape for _, k in self.kraus}
            if len(shapes) != 1:
                raise DimensionMismatch("Kraus operators have inconsistent shapes")
            norm = tuple((float(w), np.asarray(k, dtype=complex)) for w, k in self.kraus)
            object.__setattr__(self, "kraus", norm)
        elif self.kind not in _STRUCTURED:
            raise ParamOutOfRange(f"unknown map kind {self.kind!r}")

    @classmethod
    def from_kraus(cls, ops: Sequence[np.ndarray], signs: Sequence[float] | None = None):
        signs = [1.0] * len(ops) if signs is None else list(signs)
        return cls("custom_kraus", tuple(zip(signs, ops)))

    def output_dim(self, d_in: int) -> int:
        if self.kind == "custom_kraus":
            return self.kraus[0][1].shape[0]
        return d_in

    def input_dim(self) -> int | None:
        if self.kind == "custom_kraus":
            return self.kraus[0][1].shape[1]
        if self.kind == "choi":
            return 3
        return None

    def __call__(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        d = _square_tail(a)
        want = self.input_dim()
        if want is not None and want != d:
            raise DimensionMismatch(f"map expects {want}x{want} inputs, got {d}x{d}")
        if self.kind == "custom_kraus":
            return _kraus_apply(self.kraus, a)
        return _STRUCTURED[self.kind](a, self.params)

    def adjoint(self, d: int) -> "LinearMapSpec":
        """Map with ``Tr[A Lambda(B)] = Tr[Lambda^adj(A) B]``."""
        spec = self if self.kind == "custom_kraus" else witness_to_map(map_to_witness(self, d))
        return LinearMapSpec("custom_kraus", tuple((w, k.conj().T) for w, k in spec.kraus))


@dataclass(frozen=True)
class WitnessOperator:
    """Hermitian operator with its bipartite split and a kind label.

    ``kind`` is ``"entanglement"``, ``"schmidt"`` (with ``order`` = n) or
    ``"distillability"``.
    """

    matrix: np.ndarray
    dims: tuple[int, int]
    kind: str = "entanglement"
    order: int | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = int(np.prod(self.dims))
        if m.shape != (n, n):
            raise DimensionMismatch(f"witness shape {m.shape} does not match dims {self.dims}")
        if not is_hermitian(m, TAU_HERM):
            raise ParamOutOfRange("witness matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))

    def normalized(self) -> "WitnessOperator":
        """Same witness scaled to unit trace."""
        tr = float(np.trace(self.matrix).real)
        return WitnessOperator(self.matrix / tr, self.dims, self.kind, self.order)


# ------------------------------------------------------------------ operations


def apply_map_one_sided(s, m: LinearMapSpec, dims: Sequence[int] | None = None) -> np.ndarray:
    """``(1 (x) Lambda)(rho)`` computed block by block."""
    if isinstance(s, QuantumState):
        mat, dims = s.matrix, s.dims
    else:
        mat = np.asarray(s, dtype=complex)
        if dims is None:
            raise DimensionMismatch("raw matrices need explicit dims")
    if len(dims) != 2:
        raise NotBipartite(f"expected a bipartite operator, got dims {tuple(dims)}")
    da, db = (int(x) for x in dims)
    if mat.shape != (da * db,) * 2:
        raise DimensionMismatch("matrix does not match dims")
    blocks = mat.reshape(da, db, da, db).transpose(0, 2, 1, 3)
    out = m(blocks)
    do = out.shape[-1]
    return out.transpose(0, 2, 1, 3).reshape(da * do, da * do)


def map_to_witness(m: LinearMapSpec, d: int, kind: str = "entanglement") -> WitnessOperator:
    """``W = d (1 (x) Lambda)(P_+)`` on ``C^d (x) C^{d_out}``."""
    p = d * max_entangled_projector(d)
    w = apply_map_one_sided(p, m, (d, d))
    return WitnessOperator(w, (d, m.output_dim(d)), kind)


def witness_to_map(w: WitnessOperator | np.ndarray, dims: Sequence[int] | None = None) -> LinearMapSpec:
    """Inverse correspondence via the spectral decomposition of ``W``.

    Each eigenvector ``|v> = sum v_{ik} |ik>`` becomes the operator
    ``K = sum v_{ik} |k><i|`` and contributes ``lambda K A K^dagger``,
    written as ``sign(lambda) (sqrt|lambda| K) A (sqrt|lambda| K)^dagger``.
    """
    if isinstance(w, WitnessOperator):
        mat, dims = w.matrix, w.dims
    else:
        mat = np.asarray(w, dtype=complex)
        if dims is None:
            d = int(round(np.sqrt(mat.shape[0])))
            dims = (d, d)
    da, db = dims
    vals, vecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    cut = 1e-14 * max(1.0, float(np.abs(vals).max()))
    kraus = []
    for lam, v in zip(vals, vecs.T):
        if abs(lam) <= cut:
            continue
        k = np.sqrt(abs(lam)) * v.reshape(da, db).T
        kraus.append((float(np.sign(lam)), k))
    if not kraus:
        kraus.append((1.0, np.zeros((db, da), dtype=complex)))
    return LinearMapSpec("custom_kraus", tuple(kraus))


def schmidt_witness(d: int, n: int) -> WitnessOperator:
    """``W_n = 1 - d/(n-1) P_+``, nonnegative on states of Schmidt number below n."""
    if not 2 <= n <= d:
        raise InvalidOrder(f"need 2 <= n <= d, got n={n}, d={d}")
    w = np.eye(d * d) - d / (n - 1) * max_entangled_projector(d)
    return WitnessOperator(w, (d, d), "schmidt", n)


def chsh_witness(a, a_prime, b, b_prime) -> WitnessOperator:
    """``2 - [a.s (x) (b + b').s + a'.s (x) (b - b').s]`` on two qubits."""
    vecs = [np.asarray(v, dtype=float).ravel() for v in (a, a_prime, b, b_prime)]
    for v in vecs:
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise NotUnitVector(f"{v} is not a unit 3-vector")
    a, ap, b, bp = vecs

    def dot(v):
        return sum(c * s for c, s in zip(v, PAULI))

    w = 2 * np.eye(4) - (np.kron(dot(a), dot(b + bp)) + np.kron(dot(ap), dot(b - bp)))
    return WitnessOperator(w, (2, 2), "entanglement")


def klc_witness(x: QuantumState) -> WitnessOperator:
    """``P_2 (x) X^{T_B}`` reordered to ``(A1 A2 | B1 B2)``.

    ``A1 B1`` is the qubit pair carrying ``P_2``.  The operator is an
    entanglement witness across the ``2d | 2d`` cut exactly when ``X`` is
    not 1-distillable.
    """
    if not isinstance(x, QuantumState) or len(x.dims) != 2 or x.dims[0] != x.dims[1]:
        raise DimensionMismatch("klc_witness needs a state on d x d")
    d = x.dims[0]
    xtb = partial_transpose_matrix(x.matrix, x.dims, 1)
    raw = kron(max_entangled_projector(2), xtb)  # order A1 B1 A2 B2
    w = permute_subsystems(raw, (2, 2, d, d), (0, 2, 1, 3))
    return WitnessOperator(w, (2 * d, 2 * d), "distillability")


def evaluate_witness(w: WitnessOperator | np.ndarray, s) -> float:
    """``Tr(W rho)``."""
    wm = w.matrix if isinstance(w, WitnessOperator) else np.asarray(w)
    sm = s.matrix if isinstance(s, QuantumState) else np.asarray(s)
    if wm.shape != sm.shape:
        raise DimensionMismatch(f"witness {wm.shape} and state {sm.shape} differ")
    return float(np.real(np.sum(wm * sm.T)))
