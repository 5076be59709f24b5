"""Frozen reference inventories for the small ranks.

Matrices are orbit representatives as published for these class counts;
they need not coincide with our canonical forms, so tests always compare
through orbit_canonical_form.
"""

# rank 3x3: (matrix text, group name, abelian invariants (free_rank, torsion))
RANK_3x3 = [
    ("x 1 2\n1 3 4\n2 4 3", "Z x Z2", (1, (2,))),
    ("x 1 2\n1 3 4\n4 2 3", "Z4", (0, (4,))),
    ("x 1 2\n3 4 1\n4 2 3", "Z5", (0, (5,))),
]

# rank 3x5: (matrix text, order, name)
RANK_3x5 = [
    ("x 1 2 3 4\n1 2 5 6 7\n6 4 7 5 3", 8, "Z8"),
    ("x 1 2 3 4\n1 5 3 6 7\n4 7 5 2 6", 7, "Z7"),
    ("x 1 2 3 4\n1 5 3 6 7\n6 2 4 7 5", 9, "Z9"),
    ("x 1 2 3 4\n1 5 3 6 7\n7 2 5 4 6", 7, "Z7"),
    ("x 1 2 3 4\n5 2 1 6 7\n6 5 7 4 3", 8, "Dih4"),
    ("x 1 2 3 4\n5 2 3 6 7\n6 4 7 1 5", 10, "Z10"),
    ("x 1 2 3 4\n5 2 3 6 7\n6 5 7 4 1", 8, "Q8"),
    ("x 1 2 3 4\n5 2 3 6 7\n7 6 5 4 1", 8, "Z8"),
    ("x 1 2 3 4\n5 2 6 4 7\n6 7 1 5 3", 8, "Z8"),
]

# rank 3x7: the two infinite classes with their abelianisations, and the
# finite order sequence in canonical emission order
RANK_3x7_INFINITE = [
    ("x 1 2 3 4 5 6\n1 2 7 4 8 9 10\n3 5 8 6 7 10 9", (1, (2,))),
    ("x 1 2 3 4 5 6\n1 2 7 4 8 9 10\n3 5 10 6 9 8 7", (1, ())),
]
RANK_3x7_FINITE_ORDERS = (11, 12, 14, 11, 10, 10, 13, 11, 10, 12, 10, 16, 13, 12, 16, 11)
RANK_3x7_NONABELIAN = {"A4", "Q16", "Dih5"}

# rank 3x9 headline counts
RANK_3x9_CLASSES = 24
RANK_3x9_INFINITE = 2
# abelianisations of the two infinite 3x9 classes
RANK_3x9_INFINITE_INVARIANTS = {(1, (4,)), (1, (2,))}

# rank 3x11 headline counts (stretch)
RANK_3x11_CLASSES = 29
RANK_3x11_INFINITE = 2
RANK_3x11_INFINITE_INVARIANTS = {(2, ()), (1, (2,))}

# rank 5x5 headline counts (stretch)
RANK_5x5_MIRROR_NOT_DEGENERATE = 100   # mirror-form classes not proved degenerate
RANK_5x5_MIRROR_NONDEG_AT_LEAST = 79
RANK_5x5_FINITE_TOTAL = 2741
RANK_5x5_FINITE_ABELIAN = 2102
RANK_5x5_FINITE_NONABELIAN = 739
RANK_5x5_INFINITE_ABELIAN = 78
RANK_5x5_FREQ = {"S3": 558, "Dih4": 56, "Q8": 28}
RANK_5x5_BY_ORDER = {
    # order: (abelian, nonabelian)
    6: (1606, 558), 8: (274, 84), 10: (54, 0), 11: (21, 0), 12: (98, 46),
    13: (7, 0), 14: (12, 4), 15: (3, 0), 16: (16, 43), 17: (7, 0),
    18: (2, 2), 19: (2, 0), 20: (0, 2),
}

# mirror-form 5x5 classes with short hand proofs from relator subsets:
# (matrix, labels of the relators used, word, exponent with trivial power)
HAND_PROOFS = [
    ("x 1 2 3 4\n1 5 6 7 8\n2 6 9 8 10\n3 11 7 12 5\n4 10 11 9 12",
     (5, 6, 7, 8), "a1*a3^-1", 2),
    ("x 1 2 3 4\n1 5 6 7 8\n2 6 9 10 11\n3 10 7 12 5\n4 11 8 9 12",
     (5, 6, 7, 8, 12), "a1*a4^-1", 4),
    ("x 1 2 3 4\n1 5 6 7 8\n2 7 8 9 10\n3 10 5 11 12\n4 11 12 6 9",
     (5, 6, 7, 11, 9), "a1*a3^-1", 4),
]

# the two non-amenable 5x5 classes (annotation targets)
NON_AMENABLE_5x5 = [
    "x 1 2 3 4\n1 5 3 2 6\n6 4 7 8 5\n9 10 11 12 7\n10 9 12 11 8",
    "x 1 2 3 4\n1 5 3 2 6\n4 6 7 8 5\n9 10 11 12 7\n10 9 12 11 8",
]
