"""Pure-state conversion laws and mixed-state distillation formulas.

Spectra in this module are *squared* Schmidt coefficients, i.e. the
eigenvalues ``lambda_i`` of the reduced state.  Use :func:`squared` to
convert from amplitude data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParamOutOfRange
from .robustness import SchmidtSpectrum


def squared(sp: SchmidtSpectrum | Sequence[float]) -> np.ndarray:
    """Probability vector from a :class:`SchmidtSpectrum` or raw probabilities."""
    if isinstance(sp, SchmidtSpectrum):
        return sp.squared()
    return _prob(sp)


def _prob(p, name: str = "spectrum") -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0 or np.any(p < -1e-15) or abs(p.sum() - 1.0) > 1e-10:
        raise ParamOutOfRange(f"{name} must be a probability vector, got {p}")
    return np.clip(p, 0.0, None)


def _desc(p) -> np.ndarray:
    return np.sort(squared(p))[::-1]


def _pad(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = max(len(a), len(b))
    return np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))


def majorizes(x, y, tol: float = 1e-12) -> bool:
    """True when every descending partial sum of ``x`` is at least that of ``y``."""
    x, y = _pad(_desc(x), _desc(y))
    return bool(np.all(np.cumsum(x) >= np.cumsum(y) - tol))


def nielsen_feasible(source, target) -> bool:
    """Deterministic LOCC conversion ``source -> target`` is possible iff target majorizes source."""
    return majorizes(target, source)


def max_conversion_prob(source, target) -> float:
    """``min_{k >= 2} E_k(source)/E_k(target)`` with ``E_k = sum_{i >= k} lambda_i``."""
    s, t = _pad(_desc(source), _desc(target))
    es = np.cumsum(s[::-1])[::-1]
    et = np.cumsum(t[::-1])[::-1]
    ratios = [es[k] / et[k] for k in range(1, len(s)) if et[k] > 1e-15]
    if not ratios:
        return 1.0
    return float(min(1.0, max(0.0, min(ratios))))


def optimal_concentration(sp) -> tuple[np.ndarray, float]:
    """Probabilities ``p_j = j(lambda_j - lambda_{j+1})`` and the mean ``sum p_j log2 j``."""
    lam = _desc(sp)
    nxt = np.append(lam[1:], 0.0)
    j = np.arange(1, len(lam) + 1)
    p = j * (lam - nxt)
    return p, float(np.sum(p * np.log2(j)))


def e_det(sp) -> float:
    """``-log2 lambda_1``."""
    return float(-np.log2(_desc(sp)[0]))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


# ------------------------------------------------------------- recurrence


def recurrence_step(y: float) -> float:
    """``Y' = (9Y^2 + (1-Y)^2) / (9Y^2 + 6Y(1-Y) + 5(1-Y)^2)``."""
    if not 0.0 <= y <= 1.0:
        raise ParamOutOfRange(f"fidelity {y} outside [0, 1]")
    z = 1.0 - y
    return (9 * y * y + z * z) / (9 * y * y + 6 * y * z + 5 * z * z)


def recurrence_iterate(y0: float, tol: float = 1e-6, max_iter: int = 1000) -> list[float]:
    """Fidelity trajectory until ``1 - Y < tol`` or ``max_iter`` steps."""
    if not 0.5 < y0 <= 1.0:
        raise ParamOutOfRange(f"start fidelity must lie in (1/2, 1], got {y0}")
    traj = [float(y0)]
    while 1.0 - traj[-1] >= tol and len(traj) <= max_iter:
        traj.append(recurrence_step(traj[-1]))
    return traj


# --------------------------------------------------------------------- QPA


def qpa_step(p: Sequence[float]) -> np.ndarray:
    """One round of the quantum privacy amplification map on ``(p00, p01, p10, p11)``."""
    p00, p01, p10, p11 = _prob(p, "Bell weights")
    if len(np.atleast_1d(p)) != 4:
        raise ParamOutOfRange("need exactly four Bell weights")
    big = (p00 + p11) ** 2 + (p01 + p10) ** 2
    out = np.array(
        [p00 * p00 + p11 * p11, p01 * p01 + p10 * p10, 2 * p01 * p10, 2 * p00 * p11]
    ) / big
    return out / out.sum()


def qpa_sort(p: Sequence[float]) -> np.ndarray:
    """Local Bell-basis relabelling that orders weights ``p00 >= p01 >= p10 >= p11``."""
    return np.sort(_prob(p, "Bell weights"))[::-1]


def qpa_iterate(p: Sequence[float], steps: int, reorder: bool = True) -> np.ndarray:
    """Rows of Bell weights after each round, optionally re-sorted before every round."""
    rows = [np.asarray(p, dtype=float)]
    cur = rows[0]
    for _ in range(steps):
        cur = qpa_step(qpa_sort(cur) if reorder else cur)
        rows.append(cur)
    return np.array(rows)


# -------------------------------------------------------------------- BXOR


@dataclass(frozen=True)
class BellIndex:
    """``|B_{phase, shift}>``; phase 1 flips the relative sign, shift 1 flips the second bit."""

    phase: int
    shift: int

    def __post_init__(self):
        if self.phase not in (0, 1) or self.shift not in (0, 1):
            raise ParamOutOfRange("Bell indices are bits")


def bxor_bell(source: BellIndex, target: BellIndex) -> tuple[BellIndex, BellIndex]:
    """``|B_ij>|B_kl> -> |B_{i xor k, j}>|B_{k, j xor l}>``."""
    i, j = source.phase, source.shift
    k, l = target.phase, target.shift
    return BellIndex(i ^ k, j), BellIndex(k, j ^ l)


# ---------------------------------------------------------------- breeding


class Yield(NamedTuple):
    raw: float
    clamped: float


def breeding_yield(p: Sequence[float]) -> Yield:
    """``1 - S(p)`` in bits, both raw and clipped at zero."""
    p = _prob(p, "Bell weights")
    if p.size != 4:
        raise ParamOutOfRange("need exactly four Bell weights")
    raw = 1.0 - shannon_entropy(p)
    return Yield(raw, max(0.0, raw))
