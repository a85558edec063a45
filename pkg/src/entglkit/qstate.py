"""Dense density matrices, pure bipartite vectors and the basic tensor algebra.

Matrices are plain complex numpy arrays.  Subsystems are numbered from 0,
with subsystem 0 the leftmost Kronecker factor, so a state on dims
``(dA, dB)`` has row index ``a * dB + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidSubsystem,
    InvariantViolation,
    NotBipartite,
    NotHermitian,
)

TAU_HERM = 1e-10
TAU_TRACE = 1e-10
TAU_PSD = 1e-9
TAU_RANK = 1e-9
TAU_NORM = 1e-10
TAU_REC = 1e-10
TAU_WIT = 1e-8


def _scale(m: np.ndarray) -> float:
    # induced 1-norm, floored at one so tiny matrices use absolute tolerance
    return max(1.0, float(np.abs(m).sum(axis=0).max()))


def is_hermitian(m: np.ndarray, tol: float = TAU_HERM) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.abs(m - m.conj().T).max(initial=0.0)) <= tol * _scale(m)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class QuantumState:
    """Hermitian, positive semidefinite, unit-trace matrix with a subsystem split.

    Construction absorbs rounding: the matrix is replaced by its Hermitian
    part and rescaled to unit trace whenever both corrections are within
    tolerance.  Anything larger raises :class:`InvariantViolation`.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(x) for x in self.dims)
        if len(dims) < 2 or any(x < 1 for x in dims):
            raise InvariantViolation(f"dims must list at least two positive sizes, got {dims}")
        n = int(np.prod(dims))
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
        if not np.all(np.isfinite(m)):
            raise InvariantViolation("matrix has non-finite entries")
        if not is_hermitian(m):
            raise NotHermitian("state matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TAU_TRACE * _scale(m):
            raise InvariantViolation(f"trace is {tr!r}, expected 1")
        m = m / tr
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -TAU_PSD:
            raise InvariantViolation(f"minimum eigenvalue {lo!r} is negative")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_operator(cls, op: np.ndarray, dims: Sequence[int]) -> "QuantumState":
        """Normalise a positive operator by its trace and wrap it."""
        op = np.asarray(op, dtype=complex)
        return cls(op / np.trace(op).real, tuple(dims))

    @classmethod
    def from_pure(cls, psi, dims: Sequence[int] | None = None) -> "QuantumState":
        if isinstance(psi, PureStateVector):
            dims = (psi.d_a, psi.d_b) if dims is None else dims
            psi = psi.amplitudes
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def __eq__(self, other):
        if not isinstance(other, QuantumState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.matrix, other.matrix)

    __hash__ = None


@dataclass(frozen=True)
class PureStateVector:
    """Unit vector on ``C^d_a (x) C^d_b``, amplitudes indexed as ``i * d_b + j``."""

    amplitudes: np.ndarray
    d_a: int
    d_b: int

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if v.size != self.d_a * self.d_b:
            raise DimensionMismatch(f"{v.size} amplitudes for a {self.d_a}x{self.d_b} split")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > TAU_NORM:
            raise InvariantViolation(f"vector norm is {nrm!r}")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @classmethod
    def normalized(cls, v, d_a: int, d_b: int) -> "PureStateVector":
        v = np.asarray(v, dtype=complex).ravel()
        return cls(v / np.linalg.norm(v), d_a, d_b)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def as_state(self) -> QuantumState:
        return QuantumState.from_pure(self)


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left_basis: np.ndarray = field(repr=False)
    right_basis: np.ndarray = field(repr=False)
    rank: int

    def reconstruct(self) -> np.ndarray:
        return sum(
            c * np.kron(self.left_basis[k], self.right_basis[k])
            for k, c in enumerate(self.coefficients)
        )


# ---------------------------------------------------------------- helpers


def _bipartite_dims(s) -> tuple[int, int]:
    dims = s.dims if isinstance(s, QuantumState) else tuple(s)
    if len(dims) != 2:
        raise NotBipartite(f"expected two subsystems, got dims {tuple(dims)}")
    return int(dims[0]), int(dims[1])


def _unwrap(s, dims=None) -> tuple[np.ndarray, tuple[int, ...]]:
    if isinstance(s, QuantumState):
        return s.matrix, s.dims
    if dims is None:
        raise DimensionMismatch("raw matrices need explicit dims")
    m = np.asarray(s, dtype=complex)
    dims = tuple(int(x) for x in dims)
    if m.shape != (int(np.prod(dims)),) * 2:
        raise DimensionMismatch(f"matrix shape {m.shape} does not match dims {dims}")
    return m, dims


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def basis_ket(digits: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Computational basis vector ``|i_0 i_1 ...>``."""
    out = np.ones(1, dtype=complex)
    for i, d in zip(digits, dims):
        out = np.kron(out, ket(i, d))
    return out


def swap_operator(d: int) -> np.ndarray:
    """The flip ``F = sum_ij |ij><ji|`` on ``C^d (x) C^d``."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def max_entangled_projector(d: int) -> np.ndarray:
    """``P_+`` as a rank-one projector (unit trace)."""
    v = max_entangled(d).amplitudes
    return np.outer(v, v.conj())


def kron(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more matrices."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for m in more:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def permute_subsystems(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``k`` is old factor ``order[k]``."""
    dims = tuple(int(x) for x in dims)
    order = list(order)
    if sorted(order) != list(range(len(dims))):
        raise InvalidSubsystem(f"{order} is not a permutation of the subsystems")
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    t = t.transpose(order + [n + k for k in order])
    size = int(np.prod(dims))
    return t.reshape(size, size)


# ------------------------------------------------------------- operations


def partial_trace(s: QuantumState, keep: Iterable[int]) -> QuantumState:
    """Reduced state on the subsystems listed in ``keep`` (kept in ascending order).

    A single kept factor of size ``d`` comes back with dims ``(d, 1)``.
    """
    dims = s.dims
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidSubsystem("keep must be nonempty")
    for k in keep:
        if not 0 <= k < len(dims):
            raise InvalidSubsystem(f"subsystem {k} out of range for dims {dims}")
    n = len(dims)
    t = s.matrix.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for k in range(n):
        if k not in keep:
            cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    kd = tuple(dims[k] for k in keep)
    size = int(np.prod(kd))
    red = red.reshape(size, size)
    if len(kd) == 1:
        # single kept factor: pad with a trivial subsystem to satisfy the type
        return QuantumState(red, kd + (1,))
    return QuantumState(red, kd)


def partial_transpose_matrix(m: np.ndarray, dims: Sequence[int], subsystem: int) -> np.ndarray:
    """Transpose a single tensor factor of an arbitrary square operator."""
    dims = tuple(int(x) for x in dims)
    if not 0 <= subsystem < len(dims):
        raise InvalidSubsystem(f"subsystem {subsystem} out of range for dims {dims}")
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    axes = list(range(2 * n))
    axes[subsystem], axes[n + subsystem] = axes[n + subsystem], axes[subsystem]
    size = int(np.prod(dims))
    return t.transpose(axes).reshape(size, size)


def partial_transpose(s, subsystem: int = 1, dims: Sequence[int] | None = None) -> np.ndarray:
    """``rho^{T_k}`` for subsystem ``k`` (default: the second factor)."""
    m, dims = _unwrap(s, dims)
    return partial_transpose_matrix(m, dims, subsystem)


def realign(s, dims: Sequence[int] | None = None) -> np.ndarray:
    """Realigned matrix ``R(rho)[(a a'), (b b')] = rho[(a b), (a' b')]``.

    The output has shape ``(dA**2, dB**2)``; it is square only when the
    two local dimensions agree.
    """
    m, dims = _unwrap(s, dims)
    da, db = _bipartite_dims(dims)
    t = m.reshape(da, db, da, db)
    return t.transpose(0, 2, 1, 3).reshape(da * da, db * db)


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(a), compute_uv=False).sum())


def schmidt_decompose(psi: PureStateVector) -> SchmidtData:
    """Schmidt coefficients (descending) and local orthonormal bases."""
    mat = psi.amplitudes.reshape(psi.d_a, psi.d_b)
    u, s, vh = np.linalg.svd(mat)
    k = len(s)
    rank = int(np.count_nonzero(s > TAU_RANK))
    return SchmidtData(
        coefficients=s.copy(),
        left_basis=u[:, :k].T.copy(),
        right_basis=vh[:k, :].copy(),
        rank=rank,
    )


def max_entangled(d: int) -> PureStateVector:
    """``|psi_+> = sum_i |ii> / sqrt(d)``."""
    if d < 2:
        raise DimensionMismatch("d must be at least 2")
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return PureStateVector(v, d, d)


def min_eigenvalue(h: np.ndarray) -> float:
    h = np.asarray(h)
    if not is_hermitian(h):
        raise NotHermitian("min_eigenvalue needs a Hermitian matrix")
    return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])


def is_ppt(s: QuantumState, tol: float = TAU_PSD) -> bool:
    """True when the partial transpose on the second factor is PSD up to ``tol``."""
    _bipartite_dims(s)
    return min_eigenvalue(partial_transpose(s, 1)) >= -tol


def max_entangled_fidelity(s: QuantumState) -> float:
    """Overlap ``Tr(rho P_+)`` with the computational-basis maximally entangled state."""
    da, db = _bipartite_dims(s)
    if da != db:
        raise DimensionMismatch(f"need equal local dimensions, got {da} and {db}")
    v = max_entangled(da).amplitudes
    return float(np.real(v.conj() @ s.matrix @ v))


def maximally_mixed(dims: Sequence[int]) -> QuantumState:
    n = int(np.prod(dims))
    return QuantumState(np.eye(n) / n, tuple(dims))


def random_pure_vector(dim: int, gen: np.random.Generator) -> np.ndarray:
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_product_state(dims: Sequence[int], gen: np.random.Generator) -> QuantumState:
    """Product of independent Haar-random pure states, one per factor."""
    v = np.ones(1, dtype=complex)
    for d in dims:
        v = np.kron(v, random_pure_vector(int(d), gen))
    return QuantumState(np.outer(v, v.conj()), tuple(dims))
