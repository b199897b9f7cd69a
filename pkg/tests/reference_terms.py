"""Highest-weight states of the s, p and d subshell powers (reference data).

Each entry: ``(l, n, term, terms, norm)`` where the state is
``sum(a * sqrt(b) * |orbitals>) / sqrt(norm)``.  Orbitals are written as
``m`` for spin up and ``mb`` for spin down.
"""

from fractions import Fraction

from atomci.exact import SqrtRational

TABLE = [
    (0, 1, "2S", [(1, 1, "0")], 1),
    (0, 2, "1S", [(1, 1, "0 0b")], 1),
    (1, 1, "2Po", [(1, 1, "1")], 1),
    (1, 2, "1S", [(-1, 1, "1 -1b"), (1, 1, "1b -1"), (1, 1, "0 0b")], 3),
    (1, 2, "3P", [(1, 1, "1 0")], 1),
    (1, 2, "1D", [(1, 1, "1 1b")], 1),
    (1, 3, "4So", [(1, 1, "1 0 -1")], 1),
    (1, 3, "2Po", [(1, 1, "1 1b -1"), (1, 1, "1 0 0b")], 2),
    (1, 3, "2Do", [(1, 1, "1 1b 0")], 1),
    (1, 4, "1S", [(-1, 1, "1 1b -1 -1b"), (-1, 1, "1 0 0b -1b"), (1, 1, "1b 0 0b -1")], 3),
    (1, 4, "3P", [(1, 1, "1 1b 0 -1")], 1),
    (1, 4, "1D", [(1, 1, "1 1b 0 0b")], 1),
    (1, 5, "2Po", [(1, 1, "1 1b 0 0b -1")], 1),
    (1, 6, "1S", [(1, 1, "1 1b 0 0b -1 -1b")], 1),
    (2, 1, "2D", [(1, 1, "2")], 1),
    (2, 2, "1S", [(1, 1, "2 -2b"), (-1, 1, "2b -2"), (-1, 1, "1 -1b"), (1, 1, "1b -1"),
                  (1, 1, "0 0b")], 5),
    (2, 2, "3P", [(-1, 2, "2 -1"), (1, 3, "1 0")], 5),
    (2, 2, "1D", [(-1, 2, "2 0b"), (1, 2, "2b 0"), (1, 3, "1 1b")], 7),
    (2, 2, "3F", [(1, 1, "2 1")], 1),
    (2, 2, "1G", [(1, 1, "2 2b")], 1),
    (2, 3, "2P", [(4, 3, "2 1 -2b"), (-2, 3, "2 1b -2"), (-4, 2, "2 0 -1b"), (-1, 2, "2 0b -1"),
                  (-2, 3, "2b 1 -2"), (5, 2, "2b 0 -1"), (3, 3, "1 1b -1"), (3, 3, "1 0 0b")], 210),
    (2, 3, "4P", [(-1, 3, "2 1 -2"), (1, 2, "2 0 -1")], 5),
    (2, 3, "2D", [(2, 2, "2 2b -2"), (-1, 2, "2 1b -1"), (1, 2, "2b 1 -1"), (1, 3, "1 1b 0")], 15),
    (2, 3, "2D", [(-1, 1, "2 2b -2"), (-5, 1, "2 1 -1b"), (3, 1, "2 1b -1"), (5, 1, "2 0 0b"),
                  (2, 1, "2b 1 -1"), (1, 6, "1 1b 0")], 70),
    (2, 3, "2F", [(1, 6, "2 2b -1"), (-1, 1, "2 1 0b"), (-1, 1, "2 1b 0"), (2, 1, "2b 1 0")], 12),
    (2, 3, "4F", [(1, 1, "2 1 0")], 1),
    (2, 3, "2G", [(1, 2, "2 2b 0"), (1, 3, "2 1 1b")], 5),
    (2, 3, "2H", [(1, 1, "2 2b 1")], 1),
]


def orbital_local_index(l, token):
    down = token.endswith("b")
    m = int(token[:-1] if down else token)
    return 2 * (l - m) + (1 if down else 0)


def parse_ket(l, text):
    """Local bitset and reordering sign of a ket written as orbital tokens."""
    idx = [orbital_local_index(l, t) for t in text.split()]
    sign = 1
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                sign = -sign
    bits = 0
    for k in idx:
        bits |= 1 << k
    return bits, sign


def reference_state(l, terms, norm):
    """``{local bitset: SqrtRational}``."""
    out = {}
    for a, b, ket in terms:
        bits, sign = parse_ket(l, ket)
        val = sign * a
        out[bits] = SqrtRational(1 if val > 0 else -1, Fraction(a * a * b, norm))
    return out
