"""Scratch sanity checks for the grid canonicity machinery (not shipped)."""
import itertools
import sys

sys.path.insert(0, "src")
from gridgroups.grid import (
    GridDims, PairingMatrix, Pairing, all_symmetries, apply_symmetry,
    consecutive_renumbering, orbit_canonical_form, has_smaller_stacked_image,
    is_stacked, parse_matrix, format_matrix,
)


def brute_force_pairings(rows, cols):
    """All complete pairing matrices via cell matching (labels canonicalised)."""
    cells = [(i, j) for i in range(rows) for j in range(cols) if (i, j) != (0, 0)]
    out = []

    def rec(unmatched, pairs):
        if not unmatched:
            p = Pairing(GridDims(rows, cols), pairs)
            out.append(p.to_matrix())
            return
        first = unmatched[0]
        rest = unmatched[1:]
        for k, other in enumerate(rest):
            if other[0] == first[0] or other[1] == first[1]:
                continue
            rec(rest[:k] + rest[k + 1:], pairs + [(first, other)])

    rec(cells, [])
    return out


def orbit_of(mat):
    return {consecutive_renumbering(apply_symmetry(mat, g)).flat
            for g in all_symmetries(mat.dims)}


mats = brute_force_pairings(3, 3)
print("3x3 complete pairing matrices:", len(mats))

# canonical form = min of explicit orbit
for m in mats:
    orb = orbit_of(m)
    expect = min(orb)
    got = orbit_canonical_form(m).flat
    assert got == expect, (m, got, expect)
print("orbit_canonical_form agrees with explicit orbit minimum on all 3x3")

canon = {orbit_canonical_form(m).flat for m in mats}
print("3x3 classes:", len(canon))
for f in sorted(canon):
    print("   ", f)

# has_smaller_stacked_image on complete matrices == (matrix != canonical form)
for m in mats:
    mm = consecutive_renumbering(m)
    hs = has_smaller_stacked_image(mm.flat, 3, 3)
    assert hs == (mm.flat != orbit_canonical_form(m).flat), mm
print("has_smaller_stacked_image consistent on complete 3x3")

# the three listed nondegenerate 3x3 representatives: distinct classes
reps = ["x 1 2\n1 3 4\n2 4 3", "x 1 2\n1 3 4\n4 2 3", "x 1 2\n3 4 1\n4 2 3"]
canr = [orbit_canonical_form(parse_matrix(t)).flat for t in reps]
print("rep canonical forms distinct:", len(set(canr)) == 3)
for t, c in zip(reps, canr):
    print(t.replace("\n", " / "), "->", c)
