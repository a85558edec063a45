"""Which index permutations give genuinely different separability tests?

Runs the orbit classification for two to four parties, then applies the
realignment criterion to the chessboard state (PPT but entangled) and builds
the matching witness.
"""
import numpy as np

from entglkit import zoo
from entglkit.permcrit import (
    PermutationCriterion,
    classify_independent,
    criterion_value,
    permutation_witness,
    realignment_perm,
)
from entglkit.qstate import is_ppt, random_product_state

for r in (2, 3, 4):
    c = classify_independent(r)
    print(f"r={r}: {c.orbit_count} inequivalent criteria (identity included)")

rho = zoo.chessboard().state
crit = PermutationCriterion.of(realignment_perm(), 3)
print("chessboard PPT:", is_ppt(rho))
print("realignment norm:", criterion_value(rho, crit), "(7/6 =", 7 / 6, ")")

w = permutation_witness(rho, crit)
print("Tr(W rho) =", np.trace(w @ rho.matrix).real)
gen = np.random.default_rng(0)
worst = min(np.trace(w @ random_product_state((3, 3), gen).matrix).real for _ in range(500))
print("smallest value on 500 random product states:", worst)
