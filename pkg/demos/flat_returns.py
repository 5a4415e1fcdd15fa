"""First returns of a compact flat to the product cross section."""
import numpy as np

from schottky_weyl.fixtures import four_disk_product
from schottky_weyl.flow import check_C1_C2, flat_from_words, semiconjugacy_check, simulate, working_dps

G = four_disk_product(2)
words = ((1,), (1, 2))
steps = 12
dps = working_dps(G, steps)
recs = simulate(G, flat_from_words(G, words, dps), steps)
print(np.array([r.t0 for r in recs]))
print("letters", [r.letter for r in recs])

rep = check_C1_C2(G, words, returns=steps)
print("enters within one period:", rep.c1, "least gaps", rep.gaps)

rep = semiconjugacy_check(G, flat_from_words(G, words, dps), steps)
print("flow letters match the boundary map:", rep.letters_agree, "deviation", rep.max_deviation)
