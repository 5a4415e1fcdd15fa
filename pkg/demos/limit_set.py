"""Four disks on the line, their pairings, and the nested cover of the limit set."""
from schottky_weyl.fixtures import four_disk_factor
from schottky_weyl.schottky import limit_cover, validate_factor

f = four_disk_factor()
for k in f.letters:
    g = f.generators[k]
    print(f"g_{k:+d} =", g.as_tuple())

rep = validate_factor(f)
print("pairing defect", rep.pairing_defect, "gap", rep.min_gap, "passed", rep.passed)

# the cover shrinks geometrically; the total length is a crude dimension hint
for depth in range(1, 7):
    cover = limit_cover(f, depth)
    total = sum(hi - lo for _, (lo, hi) in cover)
    widest = max(hi - lo for _, (lo, hi) in cover)
    print(f"depth {depth}: {len(cover):5d} intervals, total length {total:.3e}, widest {widest:.3e}")
