"""Permutation separability criteria.

An r-partite operator on ``(C^d)^{(x) r}`` is written with 2r digits,
``rho = sum rho_{i1 i2, i3 i4, ...} |i1 i3 ...><i2 i4 ...|``: odd digit
positions index rows, even ones index columns.  A permutation ``sigma``
of the 2r positions defines the map

    [Lambda_sigma(rho)]_{i1 i2, ..., i_{2r-1} i_{2r}} = rho_{i_sigma(1) ... i_sigma(2r)}.

``[1 2 4 3]`` is the partial transpose of the second party and
``[1 3 2 4]`` is realignment.  Products of permutations are read left to
right, so ``Lambda_{tau sigma} = Lambda_sigma o Lambda_tau``.

Two criteria give the same trace norm on every Hermitian input when
their permutations lie in the same orbit of ``sigma -> g sigma t`` with
``g`` in ``{e, tau}`` and ``t`` in the group generated by swaps of row
digits, swaps of column digits and the global transpose ``tau``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotDetected, ParamOutOfRange, PartyCountTooLarge
from .qstate import QuantumState, trace_norm

MAX_TAG_PARTIES = 6
MAX_CLASSIFY_PARTIES = 4


@dataclass(frozen=True)
class PermutationCriterion:
    """A permutation of ``1..2r`` in one-line notation plus party data."""

    sigma: tuple[int, ...]
    r: int
    d: int = 2

    def __post_init__(self):
        sig = tuple(int(x) for x in self.sigma)
        if len(sig) != 2 * self.r:
            raise ParamOutOfRange(f"sigma has length {len(sig)}, expected {2 * self.r}")
        if sorted(sig) != list(range(1, 2 * self.r + 1)):
            raise ParamOutOfRange(f"{list(sig)} is not a permutation of 1..{2 * self.r}")
        if self.r < 2 or self.d < 2:
            raise ParamOutOfRange("need r >= 2 and d >= 2")
        object.__setattr__(self, "sigma", sig)

    @classmethod
    def of(cls, sigma: Sequence[int], d: int = 2) -> "PermutationCriterion":
        return cls(tuple(sigma), len(sigma) // 2, d)

    @property
    def zero_based(self) -> np.ndarray:
        return np.asarray(self.sigma, dtype=np.int64) - 1

    def __str__(self):
        return "[" + " ".join(str(x) for x in self.sigma) + "]"


# ---------------------------------------------------------- permutation algebra


def identity(r: int) -> tuple[int, ...]:
    return tuple(range(1, 2 * r + 1))


def global_transpose(r: int) -> tuple[int, ...]:
    """``tau = (1 2)(3 4)...(2r-1 2r)``."""
    out = []
    for k in range(r):
        out += [2 * k + 2, 2 * k + 1]
    return tuple(out)


def partial_transpose_perm(r: int, party: int) -> tuple[int, ...]:
    """Permutation swapping the row and column digit of ``party`` (0-based)."""
    p = list(identity(r))
    p[2 * party], p[2 * party + 1] = p[2 * party + 1], p[2 * party]
    return tuple(p)


def realignment_perm() -> tuple[int, ...]:
    return (1, 3, 2, 4)


def product(*perms: Sequence[int]) -> tuple[int, ...]:
    """Left-to-right product: ``product(a, b)`` applies ``a`` first, then ``b``."""
    out = list(range(1, len(perms[0]) + 1))
    for p in perms:
        out = [p[x - 1] for x in out]
    return tuple(out)


def inverse(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x - 1] = i + 1
    return tuple(inv)


def adjoint_perm(p: Sequence[int]) -> tuple[int, ...]:
    """``tau p^{-1} tau``: satisfies ``Tr[A Lambda_p(B)] = Tr[Lambda_adj(A) B]``."""
    t = global_transpose(len(p) // 2)
    return product(t, inverse(p), t)


# ------------------------------------------------------------- applying maps


def permute_indices(
    m: np.ndarray,
    row_dims: Sequence[int],
    col_dims: Sequence[int],
    sigma: Sequence[int],
) -> np.ndarray:
    """Apply ``Lambda_sigma`` to a (possibly rectangular) matrix.

    ``row_dims[k]`` and ``col_dims[k]`` give the ranges of digits ``2k+1`` and
    ``2k+2`` (1-based).  The result's shape follows from where each digit
    lands.
    """
    r = len(row_dims)
    if len(col_dims) != r or len(sigma) != 2 * r:
        raise DimensionMismatch("digit layout does not match the permutation length")
    m = np.asarray(m)
    t = m.reshape(tuple(row_dims) + tuple(col_dims))
    inter = [ax for k in range(r) for ax in (k, r + k)]
    pt = t.transpose(inter)
    sig0 = np.asarray(sigma, dtype=np.int64) - 1
    lt = pt.transpose(np.argsort(sig0))
    shape = lt.shape
    rows = int(np.prod(shape[0::2]))
    cols = int(np.prod(shape[1::2]))
    back = list(range(0, 2 * r, 2)) + list(range(1, 2 * r, 2))
    return lt.transpose(back).reshape(rows, cols)


def _check_state(s: QuantumState, c: PermutationCriterion) -> None:
    if len(s.dims) != c.r or any(x != c.d for x in s.dims):
        raise DimensionMismatch(
            f"state dims {s.dims} do not match {c.r} parties of dimension {c.d}"
        )


def apply_permutation(s, c: PermutationCriterion, dims: Sequence[int] | None = None) -> np.ndarray:
    """``Lambda_sigma(rho)`` for a state (or raw square matrix with ``dims``)."""
    if isinstance(s, QuantumState):
        _check_state(s, c)
        m, dims = s.matrix, s.dims
    else:
        m = np.asarray(s)
        dims = tuple(dims) if dims is not None else (c.d,) * c.r
        if len(dims) != c.r or m.shape != (int(np.prod(dims)),) * 2:
            raise DimensionMismatch("matrix does not match the criterion")
    return permute_indices(m, dims, dims, c.sigma)


def criterion_value(s, c: PermutationCriterion, dims: Sequence[int] | None = None) -> float:
    """``||Lambda_sigma(rho)||_1``; a value above one certifies entanglement."""
    return trace_norm(apply_permutation(s, c, dims))


# product states sit at exactly one, so rounding must not count as detection
DETECT_TOL = 1e-9


def permutation_witness(s: QuantumState, c: PermutationCriterion) -> np.ndarray:
    """Witness ``W = 1 - Lambda_{tau sigma^-1 tau}(V U^dagger)``, Hermitian part.

    Here ``Lambda_sigma(rho) = U D V^dagger`` is a singular value
    decomposition.  ``Tr(rho W) = 1 - ||Lambda_sigma(rho)||`` and
    ``Tr(sigma W) >= 0`` on fully separable ``sigma``.
    """
    _check_state(s, c)
    lam = apply_permutation(s, c)
    u, sv, vh = np.linalg.svd(lam)
    if sv.sum() <= 1.0 + DETECT_TOL:
        raise NotDetected(f"criterion value {sv.sum():.12g} does not exceed 1")
    k = len(sv)
    x = vh[:k].conj().T @ u[:, :k].conj().T
    # digit ranges of x follow the output layout of Lambda_sigma
    dims = list(s.dims)
    pos = [dims[k // 2] for k in range(2 * c.r)]
    inv0 = np.argsort(c.zero_based)
    out_pos = [pos[inv0[j]] for j in range(2 * c.r)]
    # x = V U^dagger maps rows<->cols of lam, so its row digits are lam's columns
    x_rows = out_pos[1::2]
    x_cols = out_pos[0::2]
    w = -permute_indices(x, x_rows, x_cols, adjoint_perm(c.sigma))
    w = w + np.eye(w.shape[0])
    return 0.5 * (w + w.conj().T)


# ------------------------------------------------------------ orbit machinery


def expected_orbit_count(r: int) -> int:
    """``(1/4)[C(2r, r) + 2^r + C(r, r/2) even(r)]``."""
    even = comb(r, r // 2) if r % 2 == 0 else 0
    total = comb(2 * r, r) + 2**r + even
    return total // 4


@lru_cache(maxsize=None)
def _symmetry_group(r: int) -> np.ndarray:
    """All ``2 (r!)^2`` elements of the norm-preserving group, 0-based arrays."""
    perms = np.array(list(itertools.permutations(range(r))), dtype=np.int8)
    n = len(perms)
    g = np.empty((n, n, 2 * r), dtype=np.int8)
    g[:, :, 0::2] = 2 * perms[:, None, :]
    g[:, :, 1::2] = 2 * perms[None, :, :] + 1
    g = g.reshape(n * n, 2 * r)
    # tau after t flips the parity of every target position
    both = np.concatenate([g, g ^ 1])
    both.flags.writeable = False
    return both


def _weights(r: int) -> np.ndarray:
    base = 2 * r
    return base ** np.arange(2 * r - 1, -1, -1, dtype=np.int64)


def _orbit_codes(sig0: np.ndarray, r: int, chunk: int = 1 << 17):
    grp = _symmetry_group(r)
    w = _weights(r)
    tau0 = np.arange(2 * r) ^ 1
    for left in (sig0, sig0[tau0]):
        for start in range(0, len(grp), chunk):
            block = grp[start : start + chunk][:, left].astype(np.int64)
            yield block @ w


def _decode(code: int, r: int) -> tuple[int, ...]:
    base = 2 * r
    digits = []
    for _ in range(2 * r):
        code, rem = divmod(int(code), base)
        digits.append(rem + 1)
    return tuple(reversed(digits))


def canonical_tag(c: PermutationCriterion | Sequence[int]) -> tuple[int, ...]:
    """Lexicographically smallest member of the orbit of ``c``, 1-based."""
    sigma = c.sigma if isinstance(c, PermutationCriterion) else tuple(c)
    r = len(sigma) // 2
    if r > MAX_TAG_PARTIES:
        raise PartyCountTooLarge(f"canonical_tag supports r <= {MAX_TAG_PARTIES}, got {r}")
    if r < 1 or len(sigma) != 2 * r:
        raise ParamOutOfRange("sigma must have even length")
    sig0 = np.asarray(sigma, dtype=np.int64) - 1
    best = min(int(codes.min()) for codes in _orbit_codes(sig0, r))
    return _decode(best, r)


def same_criterion(a, b) -> bool:
    return canonical_tag(a) == canonical_tag(b)


@dataclass(frozen=True)
class CriterionClassification:
    r: int
    orbit_count: int
    representatives: tuple[PermutationCriterion, ...]
    includes_identity: bool = True


def classify_independent(r: int, d: int = 2) -> CriterionClassification:
    """One lexicographically minimal representative per orbit of ``S_{2r}``."""
    if r > MAX_CLASSIFY_PARTIES:
        raise PartyCountTooLarge(f"classify_independent supports r <= {MAX_CLASSIFY_PARTIES}")
    if r < 2:
        raise ParamOutOfRange("need at least two parties")
    w = _weights(r)
    seen: set[int] = set()
    reps = []
    for p in itertools.permutations(range(2 * r)):
        code = int(np.dot(p, w))
        if code in seen:
            continue
        reps.append(PermutationCriterion(tuple(x + 1 for x in p), r, d))
        for codes in _orbit_codes(np.asarray(p, dtype=np.int64), r):
            seen.update(codes.tolist())
        if len(seen) == factorial(2 * r):
            break
    return CriterionClassification(
        r=r,
        orbit_count=len(reps),
        representatives=tuple(reps),
        includes_identity=reps[0].sigma == identity(r),
    )


def norm_collisions(
    classification: CriterionClassification,
    states: Sequence[QuantumState],
    tol: float = 1e-9,
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs of representatives whose trace norms agree on every sample.

    Collisions are only reported; orbits are never merged on numerical
    evidence.
    """
    reps = classification.representatives
    vals = np.array([[criterion_value(s, c) for s in states] for c in reps])
    out = []
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if np.all(np.abs(vals[i] - vals[j]) <= tol):
                out.append((reps[i].sigma, reps[j].sigma))
    return out
