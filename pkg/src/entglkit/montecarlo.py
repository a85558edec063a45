"""Random density matrices and the volume-of-distillable-states experiment.

States are drawn from the product measure: eigenvalues uniform on the
probability simplex, eigenvectors from a Haar unitary.

Seed layout: state ``k`` uses the stream ``mix(seed, k)``.  The density
matrix is drawn from that stream and the distillability search for the
state uses it as its master seed, so test ``i`` of state ``k`` draws from
``mix(mix(seed, k), i)``.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import seeding
from .distill import PRECISION, distill_test_1copy
from .errors import ParamOutOfRange
from .qstate import TAU_PSD, QuantumState, min_eigenvalue, partial_transpose_matrix

log = logging.getLogger(__name__)

D_MIN, D_MAX = 3, 7


def haar_unitary(d: int, stream) -> np.ndarray:
    """Haar-random ``d x d`` unitary (QR with the R diagonal made positive)."""
    if d < 1:
        raise ParamOutOfRange("d must be positive")
    gen = seeding.as_generator(stream)
    z = (gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    dr = np.diag(r)
    return q * (dr / np.abs(dr))


def simplex_eigenvalues(n: int, stream) -> np.ndarray:
    """Uniform point on the probability simplex via sorted-uniform spacings."""
    if n < 1:
        raise ParamOutOfRange("n must be positive")
    gen = seeding.as_generator(stream)
    cuts = np.sort(gen.random(n - 1))
    lam = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    return lam / lam.sum()


def random_density(dims, stream) -> QuantumState:
    """``U diag(lambda) U^dagger`` on the product of ``dims``."""
    dims = tuple(int(x) for x in dims)
    n = int(np.prod(dims))
    if n < 2:
        raise ParamOutOfRange("total dimension must be at least 2")
    gen = seeding.as_generator(stream)
    lam = simplex_eigenvalues(n, gen)
    u = haar_unitary(n, gen)
    return QuantumState((u * lam) @ u.conj().T, dims)


@dataclass(frozen=True)
class VolumeReport:
    """Aggregate of one volume experiment.

    ``frac_npt_undetected`` and the detection curve are fractions of the
    NPT states.  ``detection_curve`` holds ``(test_index, fraction)`` pairs
    with 1-based test indices; the fraction counts states detected by a
    random test on or before that one.  States found only by the
    refinement phase appear in ``n_detected_by_opt`` and lower
    ``frac_npt_undetected`` but not the curve.
    """

    d: int
    n_states: int
    n_tests_per_state: int
    opt_steps: int
    seed: int
    n_ppt: int
    n_npt: int
    n_npt_detected: int
    frac_ppt: float
    frac_npt_undetected: float
    first_test_fraction: float
    detection_curve: list
    wall_time: float
    n_detected_by_opt: int = 0
    ppt_detected: int = 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["detection_curve"] = [[int(i), float(f)] for i, f in self.detection_curve]
        return out


def _one_state(args) -> tuple[bool, Optional[int], bool, bool]:
    """(is_ppt, first detecting test index, detected at all, detected although PPT)."""
    d, k, n_tests, opt_steps, seed, check_ppt = args
    stream = seeding.mix(seed, k)
    s = random_density((d, d), seeding.rng(stream))
    ppt = min_eigenvalue(partial_transpose_matrix(s.matrix, (d, d), 1)) >= -TAU_PSD
    if ppt and not check_ppt:
        return True, None, False, False
    v = distill_test_1copy(s, n_tests, opt_steps, stream, PRECISION)
    return ppt, v.detection_index, v.detected, bool(ppt and v.detected)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ENTGLKIT_THREADS", "1")))
    except ValueError:
        return 1


def volume_experiment(
    d: int,
    n_states: int = 10_000,
    n_tests: int = 1000,
    opt_steps: int = 0,
    seed: int = 0,
    threads: Optional[int] = None,
    check_ppt: bool = False,
) -> VolumeReport:
    """Sample states on ``d x d``, split PPT/NPT and search NPT ones for distillability.

    ``check_ppt`` also runs the search on PPT states; any hit is recorded
    in ``ppt_detected`` (it should stay zero).
    """
    if not D_MIN <= d <= D_MAX:
        raise ParamOutOfRange(f"d={d} outside [{D_MIN}, {D_MAX}]")
    if n_states < 1 or n_tests < 1 or opt_steps < 0:
        raise ParamOutOfRange("n_states and n_tests must be positive")
    threads = _default_threads() if threads is None else max(1, int(threads))
    t0 = time.perf_counter()
    jobs = [(d, k, n_tests, opt_steps, seed, check_ppt) for k in range(n_states)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_one_state, jobs, chunksize=max(1, n_states // (8 * threads))))
    else:
        results = []
        for k, job in enumerate(jobs):
            results.append(_one_state(job))
            if (k + 1) % max(1, n_states // 10) == 0:
                log.info("d=%d: %d/%d states", d, k + 1, n_states)
    n_ppt = sum(1 for r in results if r[0])
    n_npt = n_states - n_ppt
    hist = np.zeros(n_tests, dtype=np.int64)
    by_opt = 0
    for ppt, idx, hit, _ in results:
        if ppt or not hit:
            continue
        if idx is None:
            by_opt += 1
        else:
            hist[idx] += 1
    cum = np.cumsum(hist)
    denom = max(n_npt, 1)
    curve = [(i + 1, float(cum[i] / denom)) for i in range(n_tests)]
    detected = int(cum[-1]) + by_opt
    return VolumeReport(
        d=d,
        n_states=n_states,
        n_tests_per_state=n_tests,
        opt_steps=opt_steps,
        seed=int(seed),
        n_ppt=n_ppt,
        n_npt=n_npt,
        n_npt_detected=detected,
        frac_ppt=n_ppt / n_states,
        frac_npt_undetected=(n_npt - detected) / denom,
        first_test_fraction=float(hist[0] / denom),
        detection_curve=curve,
        wall_time=time.perf_counter() - t0,
        n_detected_by_opt=by_opt,
        ppt_detected=sum(1 for r in results if r[3]),
    )
