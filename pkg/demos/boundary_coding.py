"""The boundary map on a product of two copies of the four-disk group."""
import random

import mpmath

from schottky_weyl.coding import F_apply, limit_point, orbit_code, preimages
from schottky_weyl.fixtures import four_disk_product

G = four_disk_product(2)
f = G.factors[0]
rng = random.Random(0)


def word(n):
    w = [rng.choice([-2, -1, 1, 2])]
    while len(w) < n:
        k = rng.choice([-2, -1, 1, 2])
        if k != -w[-1]:
            w.append(k)
    return w


w1, w2 = word(40), word(40)

# deep cover intervals get narrower than a double's spacing, and every step of
# the map multiplies errors by up to 81, so work with extra digits throughout
with mpmath.workdps(120):
    x = (limit_point(f, w1, dps=120), limit_point(f, w2, dps=120))
    m, y = F_apply(G, x)
    print("x =", [mpmath.nstr(t, 15) for t in x], "letters", m)
    print("preimages of the image:", len(preimages(G, y)))
    code = orbit_code(G, x, 20)
print("code  ", code[:8])
print("words ", list(zip(w1, w2))[:8])
