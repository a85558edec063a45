"""Randomised and analytic tests for one- and many-copy distillability.

The search looks for a two-dimensional projector ``P`` on Bob's side
(and, for several copies, also on Alice's side) such that
``(1 (x) P) rho^{T_B} (1 (x) P)^dagger`` has a negative eigenvalue.  A hit
certifies distillability.  Failure to find one proves nothing.

Every test ``i`` draws from its own generator seeded with ``mix(seed, i)``,
so verdicts do not depend on batching or on how many tests are requested
beyond the first detection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import seeding
from .errors import (
    NotBipartite,
    NotHermitian,
    NotOrthonormal,
    ParamOutOfRange,
    SizeCapExceeded,
    StateIsPPT,
)
from .qstate import (
    TAU_HERM,
    TAU_PSD,
    QuantumState,
    PureStateVector,
    is_hermitian,
    partial_trace,
    partial_transpose_matrix,
)
from .robustness import SchmidtSpectrum, random_schmidt_upper

PRECISION = 1e-8
SIZE_CAP = 6561
# child index of the optimisation stream; far from any test index
_OPT_STREAM = 2**62 + 1


@dataclass(frozen=True)
class DistillVerdict:
    """Outcome of a randomised distillability search.

    Attributes
    ----------
    detected : bool
        ``min_value < -precision``.
    min_value : float
        Smallest projected eigenvalue found, evaluated on orthonormal rows.
    best_rows : ndarray, shape (2, d_B)
        Orthonormal rows spanning Bob's best 2-plane.
    tests_run : int
        Random tests evaluated (stops at the first detection).
    seed : int
        Master seed.
    detection_index : int or None
        Index of the first detecting random test, if any.
    best_rows_a : ndarray or None
        Alice's 2-plane for many-copy searches.
    """

    detected: bool
    min_value: float
    best_rows: np.ndarray
    tests_run: int
    seed: int
    detection_index: Optional[int] = None
    best_rows_a: Optional[np.ndarray] = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "detected": bool(self.detected),
            "min_value": float(self.min_value),
            "best_rows": _cplx_list(self.best_rows),
            "tests_run": int(self.tests_run),
            "seed": int(self.seed),
            "detection_index": self.detection_index,
        }
        if self.best_rows_a is not None:
            out["best_rows_a"] = _cplx_list(self.best_rows_a)
        return out


def _cplx_list(rows: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in r] for r in np.asarray(rows)]


# ------------------------------------------------------------------ helpers


def _check_rows(rows: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    rows = np.asarray(rows, dtype=complex)
    if rows.ndim != 2 or rows.shape[0] != 2:
        raise NotOrthonormal(f"need two rows, got shape {rows.shape}")
    if np.max(np.abs(rows @ rows.conj().T - np.eye(2))) > tol:
        raise NotOrthonormal("rows are not orthonormal")
    return rows


def _orthonormalize(rows: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(rows.T)
    ph = np.diag(r) / np.where(np.abs(np.diag(r)) > 0, np.abs(np.diag(r)), 1.0)
    return (q * ph).T


def _project_b(r4: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``(1 (x) P) R (1 (x) P)^dagger`` for R reshaped to (dA, dB, dA, dB)."""
    da = r4.shape[0]
    m = np.einsum("ik,akbl,jl->aibj", p, r4, p.conj(), optimize=True)
    return m.reshape(2 * da, 2 * da)


def _min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def rank2_projection_value(rho_tb: np.ndarray, dims, rows) -> float:
    """Least eigenvalue of ``rho_tb`` compressed to Bob's 2-plane.

    Parameters
    ----------
    rho_tb : ndarray
        Hermitian operator on ``d_A x d_B``, typically a partial transpose.
    dims : tuple of int
        ``(d_A, d_B)``.
    rows : array_like, shape (2, d_B)
        Orthonormal rows ``<a|`` and ``<b|`` of ``P = |0><a| + |1><b|``.
    """
    rho_tb = np.asarray(rho_tb, dtype=complex)
    if not is_hermitian(rho_tb, TAU_HERM):
        raise NotHermitian("rho_tb is not Hermitian")
    da, db = dims
    rows = _check_rows(rows)
    if rows.shape[1] != db:
        raise NotOrthonormal(f"rows have length {rows.shape[1]}, expected {db}")
    return _min_eig(_project_b(rho_tb.reshape(da, db, da, db), rows))


def _haar_rows(gen: np.random.Generator, d: int) -> np.ndarray:
    """First two rows of a Haar unitary."""
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    dr = np.diag(r)
    u = q * (dr / np.abs(dr))
    return u[:2].copy()


def _chunks(total: int):
    start, size = 0, 1
    while start < total:
        n = min(size, total - start)
        yield start, n
        start += n
        size = min(size * 8, 256)


# ---------------------------------------------------------------- search


def _sample_phase(value, db, n_tests, seed, precision, stop):
    """Run random tests; returns (best value, best rows, tests run, detection index)."""
    best_val, best_rows = np.inf, None
    det = None
    run = 0
    for start, n in _chunks(n_tests):
        rows = [_haar_rows(seeding.rng(seeding.mix(seed, start + k)), db) for k in range(n)]
        vals = np.array([value(r) for r in rows])
        hits = np.nonzero(vals < -precision)[0]
        upto = n if (not stop or hits.size == 0) else int(hits[0]) + 1
        k = int(np.argmin(vals[:upto]))
        if vals[k] < best_val:
            best_val, best_rows = float(vals[k]), rows[k]
        run = start + upto
        if hits.size and det is None:
            det = start + int(hits[0])
        if stop and det is not None:
            break
    return best_val, best_rows, run, det


def _optimize(value, rows, best_val, opt_steps, seed):
    """Coordinate-wise Gaussian replacement with strict-improvement acceptance.

    One row at a time, one coordinate at a time.  Rows are renormalised
    but not kept orthogonal.
    """
    gen = seeding.rng(seeding.mix(seed, _OPT_STREAM))
    cur = rows.copy()
    val = best_val
    for _ in range(opt_steps):
        for row in range(2):
            for c in range(cur.shape[1]):
                old = cur[row].copy()
                cur[row, c] = gen.standard_normal() + 1j * gen.standard_normal()
                nrm = np.linalg.norm(cur[row])
                if nrm == 0:
                    cur[row] = old
                    continue
                cur[row] /= nrm
                new = value(cur)
                if new < val:
                    val = new
                else:
                    cur[row] = old
    return cur, val


def _search(value, db, n_tests, opt_steps, seed, precision, stop):
    """Sampling phase, optional refinement, then orthonormal re-evaluation."""
    if n_tests < 1 or opt_steps < 0:
        raise ParamOutOfRange("n_tests must be positive and opt_steps nonnegative")
    val, rows, n_run, det = _sample_phase(value, db, n_tests, seed, precision, stop)
    if opt_steps > 0 and not (stop and det is not None):
        opt_rows, _ = _optimize(value, rows, val, opt_steps, seed)
        # congruence by the Gram-Schmidt factor keeps the sign of the minimum
        cand = _orthonormalize(opt_rows)
        cand_val = value(cand)
        if cand_val < val:
            val, rows = cand_val, cand
    return val, rows, n_run, det


def _bipartite(s: QuantumState) -> tuple[int, int]:
    if not isinstance(s, QuantumState) or len(s.dims) != 2:
        raise NotBipartite("distillability tests need a bipartite state")
    da, db = s.dims
    if da < 2 or db < 2:
        raise NotBipartite(f"both parties need dimension >= 2, got {s.dims}")
    return da, db


def distill_test_1copy(
    s: QuantumState,
    n_tests: int = 10_000,
    opt_steps: int = 0,
    seed: int = 0,
    precision: float = PRECISION,
    stop_on_detect: bool = True,
) -> DistillVerdict:
    """Random search for a Bob-side 2-plane exposing a negative eigenvalue.

    With ``stop_on_detect`` the search returns at the first detecting test
    and skips refinement.  Otherwise all ``n_tests`` run and the best
    plane is refined for ``opt_steps`` sweeps.
    """
    da, db = _bipartite(s)
    r4 = partial_transpose_matrix(s.matrix, (da, db), 1).reshape(da, db, da, db)

    def value(rows):
        return _min_eig(_project_b(r4, rows))

    val, rows, n_run, det = _search(value, db, n_tests, opt_steps, seed, precision,
                                    stop_on_detect)
    return DistillVerdict(bool(val < -precision), float(val), rows, int(n_run),
                          int(seed), det)


# --------------------------------------------------------------- n copies


def _project_b_power(r4: np.ndarray, rows: np.ndarray, n: int) -> np.ndarray:
    """``(1 (x) P) (R^{(x) n}) (1 (x) P)^dagger`` without forming the power.

    ``rows`` has shape ``(2, d_B^n)``.  The result has shape
    ``(2 d_A^n, 2 d_A^n)`` with rows ordered ``(a_1 .. a_n, i)``.
    """
    da, db = r4.shape[0], r4.shape[1]
    z = np.einsum("ib,jc->ijbc", rows, rows.conj()).reshape((2, 2) + (db,) * (2 * n))
    for k in range(n):
        # axes: i, j, b_k..b_n, b'_k..b'_n, then (a, a') pairs of earlier copies
        left = n - k
        z = np.tensordot(z, r4, axes=([2, 2 + left], [1, 3]))
    # axes: i, j, a_1, a'_1, ..., a_n, a'_n
    perm = [2 + 2 * k for k in range(n)] + [0] + [3 + 2 * k for k in range(n)] + [1]
    return z.transpose(perm).reshape(2 * da ** n, 2 * da ** n)


def _alice_plane(m: np.ndarray, dan: int) -> np.ndarray:
    """Alice-side support of the least eigenvector of ``m`` (Schmidt rank <= 2)."""
    _, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    u, _, _ = np.linalg.svd(v[:, 0].reshape(dan, 2))
    return u[:, :2].T.conj()


def distill_test_ncopy(
    s: QuantumState,
    n: int = 2,
    n_tests: int = 10_000,
    opt_steps: int = 0,
    seed: int = 0,
    precision: float = PRECISION,
    size_cap: int = SIZE_CAP,
    stop_on_detect: bool = True,
) -> DistillVerdict:
    """Search on ``s^{(x) n}`` with rank-2 projectors on both sides.

    Bob's 2-plane is random.  Alice's plane is the support of the least
    eigenvector of the Bob-compressed operator, which has Schmidt rank at
    most two and therefore attains the same eigenvalue after Alice's
    projection.  ``n = 1`` is exactly :func:`distill_test_1copy`.
    """
    if n < 1:
        raise ParamOutOfRange("need n >= 1 copies")
    da, db = _bipartite(s)
    if (da * db) ** n > size_cap:
        raise SizeCapExceeded(f"(d_A d_B)^n = {(da * db) ** n} exceeds cap {size_cap}")
    if n == 1:
        return distill_test_1copy(s, n_tests, opt_steps, seed, precision, stop_on_detect)
    r4 = partial_transpose_matrix(s.matrix, (da, db), 1).reshape(da, db, da, db)
    dan, dbn = da ** n, db ** n

    def value(rows):
        return _min_eig(_project_b_power(r4, rows, n))

    val, rows_b, n_run, det = _search(value, dbn, n_tests, opt_steps, seed, precision,
                                      stop_on_detect)
    rows_a = _alice_plane(_project_b_power(r4, rows_b, n), dan)
    pw = _PowerPT(r4, da, db, n)
    val2 = _two_sided_value(pw, rows_a, rows_b)
    return DistillVerdict(bool(val2 < -precision), float(val2), rows_b, int(n_run),
                          int(seed), det, rows_a)


class _PowerPT:
    """``(rho^{T_B})^{(x) n}`` held as its single-copy factor."""

    def __init__(self, r4: np.ndarray, da: int, db: int, n: int):
        self.r = r4.reshape(da, db, da, db)
        self.da, self.db, self.n = da, db, n


def _two_sided_value(pw: _PowerPT, rows_a: np.ndarray, rows_b: np.ndarray) -> float:
    """Least eigenvalue of ``(P_A (x) P_B) R^{(x) n} (P_A (x) P_B)^dagger`` (4 x 4)."""
    n, da, db = pw.n, pw.da, pw.db
    # columns of (P_A (x) P_B)^dagger, axes (batch, a_1..a_n, b_1..b_n)
    v = np.einsum("ia,jb->ijab", rows_a.conj(), rows_b.conj()).reshape(
        (4,) + (da,) * n + (db,) * n
    )
    for k in range(n):
        # R[a, b, a', b'] acts on axes (a_k, b_k)
        v = np.tensordot(pw.r, v, axes=([2, 3], [1 + k, 1 + n + k]))
        v = np.moveaxis(v, [0, 1], [1 + k, 1 + n + k])
    left = np.einsum("ia,jb->ijab", rows_a, rows_b).reshape(4, -1)
    m = left @ v.reshape(4, -1).T
    return _min_eig(m)


def tensor_power_pt(s: QuantumState, n: int) -> np.ndarray:
    """Dense ``(rho^{T_B})^{(x) n}`` in bipartite order ``(A_1..A_n | B_1..B_n)``."""
    da, db = _bipartite(s)
    r = partial_transpose_matrix(s.matrix, (da, db), 1).reshape(da, db, da, db)
    out = np.ones((1, 1, 1, 1), dtype=complex)
    for _ in range(n):
        a, b = out.shape[0], out.shape[1]
        out = np.einsum("ABCD,abcd->AaBbCcDd", out, r).reshape(a * da, b * db, a * da, b * db)
    return out.reshape((da * db) ** n, (da * db) ** n)


# ---------------------------------------------------------------- analytic


def reduction_check(s: QuantumState) -> bool:
    """True when ``1 (x) rho_B - rho`` or ``rho_A (x) 1 - rho`` has a negative eigenvalue."""
    da, db = _bipartite(s)
    ra = partial_trace(s, [0]).matrix
    rb = partial_trace(s, [1]).matrix
    m1 = np.kron(np.eye(da), rb) - s.matrix
    m2 = np.kron(ra, np.eye(db)) - s.matrix
    return bool(min(_min_eig(m1), _min_eig(m2)) < -TAU_PSD)


@dataclass(frozen=True)
class RobustnessCheck:
    """Details behind :func:`robustness_distill_check`."""

    eigenvalue: float
    eigenvector: np.ndarray
    bound: float
    distillable: bool


def robustness_distill_details(s: QuantumState, n: int = 2) -> RobustnessCheck:
    """Compare the most negative eigenvalue of ``rho^{T_B}`` with ``-R~_{r,n}(psi)``."""
    da, db = _bipartite(s)
    if da != db:
        raise NotBipartite("the robustness test needs d x d")
    pt = partial_transpose_matrix(s.matrix, (da, db), 1)
    w, v = np.linalg.eigh(0.5 * (pt + pt.conj().T))
    lam = float(w[0])
    if lam >= -TAU_PSD:
        raise StateIsPPT("state has a positive partial transpose")
    vec = v[:, 0]
    sp = SchmidtSpectrum.from_vector(PureStateVector(vec, da, db))
    bound = random_schmidt_upper(sp, n)
    return RobustnessCheck(lam, vec, float(bound), bool(lam < -bound))


def robustness_distill_check(s: QuantumState) -> bool:
    """Sufficient 1-distillability test from random Schmidt-2 robustness."""
    return robustness_distill_details(s).distillable
