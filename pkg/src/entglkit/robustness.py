"""Closed-form robustness and Schmidt robustness of pure states.

Robustness here is measured against the *unnormalised* identity: the
random robustness ``R_r`` is the least ``t`` such that ``psi + t 1`` is
separable.  With that convention ``R_r = a1 a2`` for Schmidt coefficients
``a1 >= a2 >= ...``.  Multiply by ``d^2`` for mixing with ``1/d^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidOrder, ParamOutOfRange
from .qstate import TAU_NORM, PureStateVector, schmidt_decompose


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Descending Schmidt amplitudes ``a_i`` (not squared) in local dimension ``d``."""

    coeffs: tuple[float, ...]
    d: int

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float).ravel()
        if a.size == 0 or np.any(a < 0):
            raise ParamOutOfRange("Schmidt coefficients must be nonnegative")
        if a.size > self.d:
            raise ParamOutOfRange(f"{a.size} coefficients exceed dimension {self.d}")
        if np.any(np.diff(a) > 1e-15):
            raise ParamOutOfRange("Schmidt coefficients must be sorted descending")
        if abs(float(np.sum(a * a)) - 1.0) > TAU_NORM:
            raise ParamOutOfRange("squared coefficients must sum to 1")
        object.__setattr__(self, "coeffs", tuple(float(x) for x in a))

    @classmethod
    def of(cls, coeffs: Sequence[float], d: int | None = None) -> "SchmidtSpectrum":
        """Sort, normalise and wrap arbitrary nonnegative amplitudes."""
        a = np.sort(np.abs(np.asarray(coeffs, dtype=float)))[::-1]
        a = a / np.linalg.norm(a)
        return cls(tuple(a), len(a) if d is None else d)

    @classmethod
    def from_vector(cls, psi: PureStateVector) -> "SchmidtSpectrum":
        sd = schmidt_decompose(psi)
        a = np.clip(sd.coefficients, 0.0, None)
        return cls(tuple(a / np.linalg.norm(a)), min(psi.d_a, psi.d_b))

    @classmethod
    def max_entangled(cls, d: int) -> "SchmidtSpectrum":
        return cls(tuple([1.0 / np.sqrt(d)] * d), d)

    def padded(self) -> np.ndarray:
        a = np.zeros(self.d)
        a[: len(self.coeffs)] = self.coeffs
        return a

    def squared(self) -> np.ndarray:
        """Squared coefficients, the probability vector of the reduced state."""
        return self.padded() ** 2


class Robustness(NamedTuple):
    R_s: float
    R_g: float
    R_r: float


class ConjecturedBound(NamedTuple):
    """Lower bound that relies on an unproven optimality conjecture."""

    value: float
    eigenvalue: float
    conjecture: bool = True


def _check_order(n: int, d: int, lo: int = 1, hi: int | None = None) -> None:
    hi = d if hi is None else hi
    if not lo <= n <= hi:
        raise InvalidOrder(f"order n={n} outside [{lo}, {hi}] for d={d}")


def robustness_pure(sp: SchmidtSpectrum) -> Robustness:
    """``R_s = R_g = (sum a_i)^2 - 1`` and ``R_r = a1 a2``."""
    a = sp.padded()
    rs = float(a.sum() ** 2 - 1.0)
    rr = float(a[0] * a[1]) if len(a) > 1 else 0.0
    return Robustness(max(rs, 0.0), max(rs, 0.0), rr)


def gen_schmidt_robustness_maxent(d: int, n: int) -> float:
    """Generalised Schmidt-n robustness of ``P_+`` in ``d x d``: ``(d - n)/n``."""
    _check_order(n, d)
    return (d - n) / n


def gen_schmidt_robustness_bounds(sp: SchmidtSpectrum, n: int) -> tuple[float, float]:
    """``((sum a)^2/n - 1, R_g (d - n)/((d - 1) n))``, lower clamped at zero."""
    d = sp.d
    _check_order(n, d)
    a = sp.padded()
    lower = max(float(a.sum() ** 2 / n - 1.0), 0.0)
    rg = robustness_pure(sp).R_g
    upper = rg * (d - n) / ((d - 1) * n) if d > 1 else 0.0
    return lower, float(upper)


def random_schmidt_upper(sp: SchmidtSpectrum, n: int) -> float:
    """``a1 a2 (d - n)/(d n - 1)``."""
    d = sp.d
    _check_order(n, d)
    return robustness_pure(sp).R_r * (d - n) / (d * n - 1)


def random_schmidt_lower(sp: SchmidtSpectrum, n: int) -> ConjecturedBound:
    """Lower bound from the filtered Schmidt witnesses.

    ``lambda_min`` is the smallest eigenvalue of ``(1 - nJ/(nd - 1))(nD - B)``
    with ``J`` all ones, ``D = diag(b_i^2)`` and ``B_ij = b_i b_j``.  The
    returned ``value`` is ``lambda_min / d^2``; ``eigenvalue`` keeps the
    raw ``lambda_min``.  Optimality of the witness class is conjectural.
    """
    d = sp.d
    _check_order(n, d, 1, d - 1)
    b = sp.padded()
    j = np.ones((d, d))
    m = (np.eye(d) - n * j / (n * d - 1)) @ (n * np.diag(b * b) - np.outer(b, b))
    lam = float(np.min(np.linalg.eigvals(m).real))
    lam = max(lam, 0.0) if abs(lam) < 1e-14 else lam
    return ConjecturedBound(lam / (d * d), lam, True)


def schmidt_ball_constant(k: int) -> float:
    """Conjectured radius ``2(2k^2 - 1)`` of Schmidt-number-k balls (metadata only)."""
    return 2.0 * (2 * k * k - 1)
