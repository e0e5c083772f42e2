"""
Cantor sets, covers and point location
======================================

A middle-1/p Cantor set is the attractor of two contractions of ratio
r = (1 - 1/p)/2. Its depth-n cover lists the 2^n surviving intervals, each
named by the binary address of the maps that produced it.
"""

import math

import numpy as np

from fractalcalc import locate, make_middle_p_cantor, refine

C = make_middle_p_cantor(3)
print("maps:", [(f.ratio, f.offset) for f in C.maps])
print("dimension q = ln 2 / ln 3 =", C.dimension)

# the depth-2 cover: [0,1/9], [2/9,1/3], [2/3,7/9], [8/9,1]
for iv in refine(C, 2):
    print(f"  {iv.address}: [{iv.lo:.6f}, {iv.hi:.6f}]")

# box counting on a fine cover recovers the similarity dimension
cover = refine(C, 12)
for k in (4, 8):
    eps = 3.0**-k
    boxes = np.unique(np.floor(cover.lo / eps + 1e-9)).size
    print(f"box-counting estimate at eps = 3^-{k}: {math.log(boxes) / math.log(1 / eps):.6f}")

# points either sit in a cover interval or fall into a gap at some generation
for x in (2 / 3, 0.5, 0.15):
    print(f"locate({x:.4f}):", locate(C, x, 5))

# other members of the family, on other intervals
D = make_middle_p_cantor(4, ambient=(2.0, 5.0))
print("middle-1/4 set on [2, 5]: ratio", D.ratio, "dimension", D.dimension)
