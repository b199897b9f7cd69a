"""Exact LS decomposition of subshell powers and configurations.

Subshell spaces ``wedge^n V_l`` are split into irreducible ``(L, S)`` blocks
by computing, for each candidate ``(L, S)``, the kernel of the stacked
operator ``(L^2 - L(L+1) | S^2 - S(S+1))`` on the weight space
``M_L = L, M_S = S`` and then descending with ``L_-`` and ``S_-``.

All linear algebra is done over the rationals in the rescaled
single-particle basis of :func:`atomci.angular.scale_factors_squared`;
coefficients in the orthonormal determinant basis come out as signed square
roots of rationals (:class:`~atomci.exact.SqrtRational`).

Configurations are handled by coupling subshell blocks left to right with
Clebsch-Gordan coefficients.  Coupled blocks are lazy: a state
``|L M_L; S M_S>`` is only expanded into determinants when requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .angular import (configuration_parity, orbital_quantum_numbers,
                      scale_factors_squared, scaled_operators)
from .exact import SqrtRational, nullspace
from .fock import (Configuration, FullSpace, SymmetryAdaptedState,
                   embed_tensor_product, enumerate_configurations,
                   index_determinants, occupied, popcount)
from .model import ModelSpec, Subshell, parse_subshell, term_symbol

HALF = Fraction(1, 2)


class RationalizationError(ValueError):
    """Coefficient squares could not be matched to small rationals."""


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------

class IrreducibleBlock:
    """One irreducible ``(L, S)`` representation space.

    States are dictionaries mapping determinant keys to
    :class:`SqrtRational` coefficients.  Keys are tuples of local subshell
    bitsets, one entry per subshell taking part in the block.

    Parameters
    ----------
    L : int
    S : Fraction
    parity : int
    builder : callable ``(ML, MS) -> dict``
        Produces the state with the given projections.
    path : tuple
        Human-readable description of how the block was obtained.
    """

    def __init__(self, L, S, parity, builder: Callable, path=(), subshells=()):
        self.L = int(L)
        self.S = Fraction(S)
        self.parity = parity
        self._builder = builder
        self._states: dict = {}
        self.path = tuple(path)
        self.subshells = tuple(subshells)

    @property
    def dim(self) -> int:
        return (2 * self.L + 1) * int(2 * self.S + 1)

    @property
    def term(self) -> str:
        return term_symbol(self.L, self.S, self.parity)

    def projections(self):
        """All ``(ML, MS)`` pairs, ``ML`` and ``MS`` descending."""
        ms = [self.S - k for k in range(int(2 * self.S) + 1)]
        return [(ml, m) for ml in range(self.L, -self.L - 1, -1) for m in ms]

    def state(self, ML, MS=None) -> dict:
        MS = self.S if MS is None else Fraction(MS)
        if abs(ML) > self.L or abs(MS) > self.S or (self.S - MS).denominator != 1:
            raise ValueError(f"projection ({ML}, {MS}) invalid for {self.term}")
        key = (int(ML), MS)
        st = self._states.get(key)
        if st is None:
            st = self._builder(*key)
            self._states[key] = st
        return st

    @property
    def basis(self) -> list[dict]:
        return [self.state(ml, ms) for ml, ms in self.projections()]

    def highest_weight(self) -> dict:
        return self.state(self.L, self.S)

    def __repr__(self):
        return f"IrreducibleBlock({self.term}, path={self.path})"


# ---------------------------------------------------------------------------
# subshell decomposition
# ---------------------------------------------------------------------------

def _det_weights(l: int, dets: Sequence[int]) -> list[Fraction]:
    w = scale_factors_squared(l)
    out = []
    for d in dets:
        p = Fraction(1)
        for k in occupied(d):
            p *= w[k]
        out.append(p)
    return out


def _det_projections(l: int, det: int) -> tuple[int, Fraction]:
    ml, ms = 0, Fraction(0)
    for k in occupied(det):
        m, s = orbital_quantum_numbers(l, k)
        ml += m
        ms += s
    return ml, ms


def _weighted_dot(x: dict, y: dict, w: list) -> Fraction:
    if len(x) > len(y):
        x, y = y, x
    return sum((v * y[k] * w[k] for k, v in x.items() if k in y), Fraction(0))


def _to_sqrt_rational(x: dict, w: list, dets: list) -> dict:
    """Scaled-basis rational vector -> normalized exact coefficients."""
    nrm = _weighted_dot(x, x, w)
    out = {}
    for k, v in sorted(x.items()):
        out[(dets[k],)] = SqrtRational(1 if v > 0 else -1, v * v * w[k] / nrm)
    return out


def _highest_weight_vectors(l: int, n: int, L: int, S: Fraction, idx, proj, w):
    ops = scaled_operators(l, n)
    cols = [k for k, pr in enumerate(proj) if pr == (L, S)]
    if not cols:
        return []
    pos = {k: c for c, k in enumerate(cols)}
    L2, S2 = ops["L2"], ops["S2"]
    rows = []
    shift = {"L2": Fraction(L * (L + 1)), "S2": S * (S + 1)}
    for name, op in (("L2", L2), ("S2", S2)):
        for r in cols:
            row = [Fraction(0)] * len(cols)
            for c, v in op.rows[r].items():
                if c in pos:
                    row[pos[c]] += v
            row[pos[r]] -= shift[name]
            rows.append(row)
    kern = nullspace(rows, len(cols))
    # weighted Gram-Schmidt in the true inner product
    basis: list[dict] = []
    for v in kern:
        x = {cols[c]: q for c, q in enumerate(v) if q}
        for u in basis:
            f = _weighted_dot(x, u, w) / _weighted_dot(u, u, w)
            for k, q in u.items():
                x[k] = x.get(k, 0) - f * q
            x = {k: q for k, q in x.items() if q}
        first = min(x)
        if x[first] < 0:
            x = {k: -q for k, q in x.items()}
        basis.append(x)
    return basis


def _lookup(table: dict):
    return lambda ML, MS: table[(ML, MS)]


def _lower(op, x: dict) -> dict:
    return {r: v for r, v in op.apply(x).items() if v}


@lru_cache(maxsize=None)
def decompose_subshell(l: int, n: int) -> tuple[IrreducibleBlock, ...]:
    """Irreducible ``(L, S)`` blocks of ``wedge^n V_l``.

    Blocks are ordered by ``(L, S)`` and, for repeated terms, by kernel order.
    Every state is a dict ``{(local bitset,): SqrtRational}``.
    """
    k = 2 * (2 * l + 1)
    if not 0 <= n <= k:
        raise ValueError("particle number out of range")
    idx = index_determinants(FullSpace(k, n))
    dets = idx.dets
    proj = [_det_projections(l, d) for d in dets]
    w = _det_weights(l, dets)
    ops = scaled_operators(l, n)
    parity = -1 if (n * l) % 2 else 1
    blocks = []
    Ls = sorted({p[0] for p in proj if p[0] >= 0})
    Ss = sorted({p[1] for p in proj if p[1] >= 0})
    for L in Ls:
        for S in Ss:
            for hw in _highest_weight_vectors(l, n, L, S, idx, proj, w):
                # descend in the rescaled basis, normalize at the end
                table = {}
                col = hw
                for ML in range(L, -L - 1, -1):
                    x = col
                    for j in range(int(2 * S) + 1):
                        table[(ML, S - j)] = _to_sqrt_rational(x, w, dets)
                        x = _lower(ops["Sm"], x)
                    col = _lower(ops["Lm"], col)
                blocks.append(IrreducibleBlock(
                    L, S, parity, _lookup(table),
                    path=((l, n, term_symbol(L, S, parity), len(blocks)),),
                    subshells=((l, n),)))
    total = sum(b.dim for b in blocks)
    if total != len(dets):
        raise AssertionError(f"decomposition of wedge^{n} V_{l} incomplete: {total} != {len(dets)}")
    return tuple(blocks)


def term_multiset(l: int, n: int) -> list[str]:
    return sorted(b.term for b in decompose_subshell(l, n))


# ---------------------------------------------------------------------------
# rationalization
# ---------------------------------------------------------------------------

def _simplest_rational(x: float, tol: float, max_den: int) -> Fraction | None:
    """Smallest-denominator convergent of ``x`` within ``tol``."""
    frac = Fraction(x)
    a = math.floor(frac)
    h0, h1, k0, k1 = 1, a, 0, 1
    rest = frac - a
    while True:
        if k1 > max_den:
            return None
        if abs(h1 / k1 - x) <= tol:
            return Fraction(h1, k1)
        if rest == 0:
            return None
        frac = 1 / rest
        a = math.floor(frac)
        rest = frac - a
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0


def rationalize_state(coeffs, tol: float = 1e-9, max_den: int = 10**6) -> list[SqrtRational]:
    """Float coefficients -> exact ``+-sqrt(p/q)`` with unit norm.

    The vector is normalized first; every squared coefficient is replaced by
    the simplest rational within ``tol`` (denominator at most ``max_den``).

    Raises
    ------
    RationalizationError
        If a square has no such rational or the rational squares do not sum
        to exactly one.
    """
    v = np.asarray(coeffs, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise RationalizationError("zero vector")
    v = v / nrm
    out = []
    for c in v:
        q = _simplest_rational(float(c * c), tol, max_den)
        if q is None:
            raise RationalizationError(f"no rational square near {c * c!r}")
        out.append(SqrtRational(1 if c > 0 else -1, q) if q else SqrtRational(0, 0))
    if sum((x.square for x in out), Fraction(0)) != 1:
        raise RationalizationError("rationalized squares do not sum to one")
    return out


# ---------------------------------------------------------------------------
# Clebsch-Gordan coupling
# ---------------------------------------------------------------------------

def _is_half_integer(x: Fraction) -> bool:
    return (2 * x).denominator == 1


@lru_cache(maxsize=None)
def clebsch_gordan(j1, j2, j, m1, m2) -> SqrtRational:
    """``<j1 m1 j2 m2 | j m1+m2>`` in the Condon-Shortley convention (Racah formula).

    Raises
    ------
    ValueError
        On invalid quantum numbers (triangle rule, ``|m_i| <= j_i``,
        integrality of ``j_i - m_i``).
    """
    j1, j2, j, m1, m2 = (Fraction(x) for x in (j1, j2, j, m1, m2))
    for x in (j1, j2, j, m1, m2):
        if not _is_half_integer(x):
            raise ValueError("quantum numbers must be integers or half-integers")
    if min(j1, j2, j) < 0 or not abs(j1 - j2) <= j <= j1 + j2 or (j1 + j2 + j).denominator != 1:
        raise ValueError(f"triangle rule violated for ({j1}, {j2}, {j})")
    if abs(m1) > j1 or abs(m2) > j2 or (j1 - m1).denominator != 1 or (j2 - m2).denominator != 1:
        raise ValueError("projection out of range")
    m = m1 + m2
    if abs(m) > j:
        return SqrtRational(0, 0)
    f = math.factorial

    def I(x):
        assert x.denominator == 1
        return int(x)

    pre = Fraction(I(2 * j) + 1)
    pre *= Fraction(f(I(j + j1 - j2)) * f(I(j - j1 + j2)) * f(I(j1 + j2 - j)), f(I(j1 + j2 + j + 1)))
    pre *= f(I(j + m)) * f(I(j - m)) * f(I(j1 - m1)) * f(I(j1 + m1)) * f(I(j2 - m2)) * f(I(j2 + m2))
    total = Fraction(0)
    for k in range(0, I(j1 + j2 - j) + 1):
        args = [j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k]
        if any(a < 0 for a in args):
            continue
        den = f(k)
        for a in args:
            den *= f(I(a))
        total += Fraction((-1) ** k, den)
    if total == 0:
        return SqrtRational(0, 0)
    return SqrtRational(1 if total > 0 else -1, pre * total * total)


def _range_half(a: Fraction, b: Fraction):
    x = a
    while x <= b:
        yield x
        x += 1


def couple_blocks(a: IrreducibleBlock, b: IrreducibleBlock, allowed=None) -> list[IrreducibleBlock]:
    """Irreducible blocks of the tensor product ``a (x) b``.

    ``allowed`` optionally filters the output by a predicate ``(L, S) -> bool``.
    Coefficients are products of the factor coefficients and two
    Clebsch-Gordan coefficients; no sums occur because every product
    determinant carries definite projections.
    """
    out = []
    for L in range(abs(a.L - b.L), a.L + b.L + 1):
        for S in _range_half(abs(a.S - b.S), a.S + b.S):
            if allowed is not None and not allowed(L, S):
                continue
            out.append(_coupled(a, b, L, S))
    return out


def _coupled(a: IrreducibleBlock, b: IrreducibleBlock, L: int, S: Fraction) -> IrreducibleBlock:
    def build(ML, MS):
        res = {}
        for ma in range(-a.L, a.L + 1):
            mb = ML - ma
            if abs(mb) > b.L:
                continue
            cl = clebsch_gordan(a.L, b.L, L, ma, mb)
            if not cl:
                continue
            for sa in _range_half(-a.S, a.S):
                sb = MS - sa
                if abs(sb) > b.S:
                    continue
                cs = clebsch_gordan(a.S, b.S, S, sa, sb)
                if not cs:
                    continue
                f = cl * cs
                sta, stb = a.state(ma, sa), b.state(mb, sb)
                for ka, ca in sta.items():
                    fa = f * ca
                    for kb, cb in stb.items():
                        key = ka + kb
                        if key in res:
                            raise AssertionError("overlapping product terms")
                        res[key] = fa * cb
        return res

    path = a.path + b.path + (("->", term_symbol(L, S, a.parity * b.parity)),)
    return IrreducibleBlock(L, S, a.parity * b.parity, build, path=path,
                            subshells=a.subshells + b.subshells)


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

@dataclass
class SymmetrySubspace:
    """Basis of one ``(L, S, ML, MS, parity)`` subspace over N-particle determinants.

    Attributes
    ----------
    labels : tuple
        ``(L, S, ML, MS, parity)``.
    states : list of SymmetryAdaptedState
    provenance : list
        ``(configuration, block path)`` per state.
    """

    labels: tuple
    states: list
    provenance: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def term(self) -> str:
        L, S, _, _, p = self.labels
        return term_symbol(L, S, p)

    def configurations(self) -> list[Configuration]:
        return [p[0] for p in self.provenance]

    def gram(self) -> np.ndarray:
        n = len(self.states)
        g = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = self.states[i].dot(self.states[j])
        return g

    def determinants(self) -> list[int]:
        seen = set()
        for st in self.states:
            seen.update(st.coeffs)
        return sorted(seen)

    def coefficient_matrix(self, dets=None) -> tuple[np.ndarray, list[int]]:
        """Dense ``(ndet, dim)`` float matrix of state coefficients."""
        dets = self.determinants() if dets is None else dets
        pos = {d: k for k, d in enumerate(dets)}
        c = np.zeros((len(dets), len(self.states)))
        for j, st in enumerate(self.states):
            for d, v in st.coeffs.items():
                c[pos[d], j] = float(v)
        return c, dets


def _closed_block(l: int) -> IrreducibleBlock:
    return decompose_subshell(l, 2 * (2 * l + 1))[0]


def configuration_blocks(config: Configuration, target=None) -> list[IrreducibleBlock]:
    """Left-fold coupling of all subshells of ``config``.

    ``target`` is an optional ``(L, S)`` pair; intermediate couplings that
    can no longer reach it are pruned.  Empty subshells are skipped.
    """
    occ = [(s, d) for s, d in zip(config.subshells, config.occupations) if d]
    if not occ:
        raise ValueError("empty configuration")
    factors = []
    for s, d in occ:
        factors.append(decompose_subshell(s.l, d))
    maxL = [max(b.L for b in f) for f in factors]
    maxS = [max(b.S for b in f) for f in factors]

    def reachable(k):
        if target is None:
            return None
        Lt, St = int(target[0]), Fraction(target[1])
        remL, remS = sum(maxL[k + 1:]), sum(maxS[k + 1:], Fraction(0))
        return lambda L, S: abs(L - Lt) <= remL and abs(S - St) <= remS

    pred0 = reachable(0)
    current = [b for b in factors[0] if pred0 is None or pred0(b.L, b.S)]
    for k in range(1, len(factors)):
        pred = reachable(k)
        nxt = []
        for a in current:
            for b in factors[k]:
                nxt.extend(couple_blocks(a, b, pred))
        current = nxt
    return current


def _block_state(block: IrreducibleBlock, config: Configuration, ML, MS) -> SymmetryAdaptedState:
    local = block.state(ML, MS)
    occ_subs = [k for k, d in enumerate(config.occupations) if d]
    offsets = config.space.offsets
    coeffs = {}
    for key, c in local.items():
        det = 0
        for k, bits in zip(occ_subs, key):
            det |= bits << offsets[k]
        coeffs[det] = c
    return SymmetryAdaptedState(coeffs, labels=(block.L, block.S, ML, MS, block.parity),
                                provenance=(config, block.path))


def _describe(config: Configuration, path: tuple) -> str:
    occ = [s for s, d in zip(config.subshells, config.occupations) if d]
    parts = []
    for sub, step in zip(occ, [p for p in path if p[0] != "->"]):
        parts.append(f"{sub.label}{step[1]}({step[2]}#{step[3]})")
    return " x ".join(parts)


def decompose_configuration(config: Configuration, target=None, projections=None) -> list[SymmetrySubspace]:
    """Symmetry subspaces of one configuration.

    Parameters
    ----------
    config : Configuration
    target : (L, S), optional
        Restrict to one term.
    projections : iterable of (ML, MS), optional
        Restrict the emitted subspaces to these projections (all by default).

    Returns
    -------
    list of SymmetrySubspace
        One subspace per ``(L, S, ML, MS)``; summing their dimensions over
        all terms and projections gives ``config.dim``.
    """
    parity = configuration_parity(config)
    blocks = configuration_blocks(config, target)
    if target is not None:
        blocks = [b for b in blocks if b.L == int(target[0]) and b.S == Fraction(target[1])]
    groups: dict = {}
    for b in blocks:
        groups.setdefault((b.L, b.S), []).append(b)
    out = []
    for (L, S), bl in sorted(groups.items()):
        projs = bl[0].projections() if projections is None else [
            (int(ml), Fraction(ms)) for ml, ms in projections
            if abs(ml) <= L and abs(Fraction(ms)) <= S and (S - Fraction(ms)).denominator == 1]
        for ML, MS in projs:
            states = [_block_state(b, config, ML, MS) for b in bl]
            out.append(SymmetrySubspace((L, S, ML, MS, parity), states,
                                        [(config, b.path) for b in bl]))
    return out


def restrict_m(subspaces: Sequence[SymmetrySubspace], m_l: int = 0, m_s=None) -> SymmetrySubspace:
    """Union of the ``(m_l, m_s)`` columns of subspaces sharing ``(L, S, parity)``.

    ``m_s`` defaults to ``S``.
    """
    if not subspaces:
        raise ValueError("no subspaces given")
    L, S, _, _, parity = subspaces[0].labels
    if any((s.labels[0], s.labels[1], s.labels[4]) != (L, S, parity) for s in subspaces):
        raise ValueError("subspaces carry different (L, S, parity) labels")
    m_s = S if m_s is None else Fraction(m_s)
    if abs(m_l) > L or abs(m_s) > S:
        raise ValueError("projection out of range")
    states, prov = [], []
    for s in subspaces:
        if s.labels[2] == m_l and s.labels[3] == m_s:
            states.extend(s.states)
            prov.extend(s.provenance)
    return SymmetrySubspace((L, S, m_l, m_s, parity), states, prov)


def model_configurations(spec: ModelSpec) -> list[Configuration]:
    """Configurations of ``spec`` whose parity matches the target parity."""
    confs = enumerate_configurations(spec)
    if spec.target is not None:
        confs = [c for c in confs if configuration_parity(c) == spec.target[2]]
    return confs


def term_dimension(spec: ModelSpec) -> int:
    """Dimension of the full ``(L, S)`` eigenspace (all projections)."""
    L, S, _ = spec.target
    total = 0
    for c in model_configurations(spec):
        nb = sum(1 for b in configuration_blocks(c, (L, S)) if b.L == L and b.S == S)
        total += nb * (2 * L + 1) * int(2 * S + 1)
    return total


def target_subspace(spec: ModelSpec, m_l: int = 0, m_s=None) -> SymmetrySubspace:
    """Symmetry subspace of the model's target term at fixed projections."""
    if spec.target is None:
        raise ValueError("model has no target symmetry")
    L, S, parity = spec.target
    m_s = S if m_s is None else Fraction(m_s)
    subs = []
    for c in model_configurations(spec):
        subs.extend(decompose_configuration(c, (L, S), projections=[(m_l, m_s)]))
    if not subs:
        return SymmetrySubspace((L, S, m_l, m_s, parity), [], [])
    return restrict_m(subs, m_l, m_s)


# ---------------------------------------------------------------------------
# Hund's rules
# ---------------------------------------------------------------------------

def reference_configuration(spec: ModelSpec) -> Configuration:
    """Lowest configuration of the model under Madelung filling.

    Active subshells are filled in order of increasing ``n + l`` (ties by
    increasing ``n``); constrained subshells keep their fixed occupation.
    """
    fixed = dict(spec.constraints)
    core = set(spec.core)
    occ = {s: (s.dim if s in core else fixed.get(s, 0)) for s in spec.subshells}
    left = spec.N - sum(occ.values())
    for s in sorted((s for s in spec.active if s not in fixed), key=lambda s: (s.n + s.l, s.n)):
        take = min(s.dim, left)
        occ[s] = take
        left -= take
    if left:
        raise ValueError("cannot place all electrons")
    return Configuration(spec.subshells, tuple(occ[s] for s in spec.subshells))


def _term_labels(l: int, n: int) -> list[tuple[int, Fraction]]:
    return [(b.L, b.S) for b in decompose_subshell(l, n)]


def hund_select(family) -> tuple[int, Fraction]:
    """Term with maximal ``S`` and then maximal ``L`` of the reference configuration.

    ``family`` is a :class:`ModelSpec` (its Madelung reference configuration
    is used), a :class:`Configuration`, or a sequence of ``(l, occupation)``
    pairs such as ``[(2, 5), (0, 1)]``.
    """
    if isinstance(family, ModelSpec):
        family = reference_configuration(family)
    if isinstance(family, Configuration):
        pairs = [(s.l, d) for s, d in zip(family.subshells, family.occupations) if d]
    else:
        pairs = [(int(l), int(d)) for l, d in family]
    terms = {(0, Fraction(0))}
    for l, d in pairs:
        new = set()
        for L1, S1 in terms:
            for L2, S2 in _term_labels(l, d):
                for L in range(abs(L1 - L2), L1 + L2 + 1):
                    for S in _range_half(abs(S1 - S2), S1 + S2):
                        new.add((L, S))
        terms = new
    return max(terms, key=lambda t: (t[1], t[0]))


# ---------------------------------------------------------------------------
# serialization of subshell tables
# ---------------------------------------------------------------------------

TABLE_SCHEMA = "atomci.subshell-table/1"


def subshell_table_to_json(l: int, n: int) -> dict:
    """Versioned JSON form; coefficients as ``(sign, num, den)`` of the square."""
    blocks = []
    for b in decompose_subshell(l, n):
        states = []
        for ml, ms in b.projections():
            st = b.state(ml, ms)
            states.append({"ML": ml, "MS": str(ms),
                           "terms": [[k[0], *c.triple()] for k, c in sorted(st.items())]})
        blocks.append({"L": b.L, "S": str(b.S), "states": states})
    return {"schema": TABLE_SCHEMA, "l": l, "n": n, "blocks": blocks}


def subshell_table_from_json(data: dict) -> list[IrreducibleBlock]:
    if data.get("schema") != TABLE_SCHEMA:
        raise ValueError(f"unsupported table schema {data.get('schema')!r}")
    l, n = data["l"], data["n"]
    parity = -1 if (n * l) % 2 else 1
    out = []
    for i, b in enumerate(data["blocks"]):
        table = {}
        for st in b["states"]:
            table[(st["ML"], Fraction(st["MS"]))] = {
                (t[0],): SqrtRational.from_triple(t[1:]) for t in st["terms"]}
        L, S = b["L"], Fraction(b["S"])
        out.append(IrreducibleBlock(L, S, parity, _lookup(table),
                                    path=((l, n, term_symbol(L, S, parity), i),),
                                    subshells=((l, n),)))
    return out
