"""Positive maps and their witnesses on the Stormer family.

The Choi map certifies entanglement of sigma(alpha) on both PPT-entangled
windows once it is applied on either side. A negative entry in either column
is an entanglement certificate.
"""
import numpy as np

from entglkit import zoo
from entglkit.qstate import is_ppt, swap_operator
from entglkit.witness import LinearMapSpec, apply_map_one_sided

choi = LinearMapSpec("choi")
f = swap_operator(3)
print(" alpha   PPT   right side   left side")
for alpha in np.arange(1.0, 4.01, 0.5):
    s = zoo.stormer(alpha).state
    right = np.linalg.eigvalsh(apply_map_one_sided(s, choi, (3, 3))).min()
    left = np.linalg.eigvalsh(f @ apply_map_one_sided(f @ s.matrix @ f, choi, (3, 3)) @ f).min()
    print(f"{alpha:5.1f}  {is_ppt(s)!s:5}  {right:+.5f}     {left:+.5f}")
