"""Reduced density matrices of state pairs and their spin traces.

For a pair ``|psi><chi|`` of N-electron states the spin-orbital matrices are

* ``gamma[i, j] = <chi| a_j^dagger a_i |psi>``
* ``D[(p, r), (q, s)] = <chi| a_p^dagger a_r^dagger a_s a_q |psi>`` for
  ordered pairs ``p < r`` and ``q < s``.

Both are built from hole intermediates ``<D''| a_s a_q |phi>`` so that every
matrix element is a sparse product of two sides rather than a double loop
over determinants.  When all determinants of both states share a fully
occupied prefix of spin orbitals (the frozen core), only the active part is
expanded and the core entries are filled in from closed expressions.

Spin-traced matrices use spatial indices ``i = p // 2``::

    gamma_hat[i, j]        = sum_a gamma[(i,a), (j,a)]
    Gamma_hat[(k,l),(i,j)] = sum over spin pairs with (i,a) < (k,b) of
                             <chi| a_{ia}^dagger a_{kb}^dagger a_{lb} a_{ja} |psi>

``Gamma_hat`` is stored as a sparse ``K^2 x K^2`` matrix with row ``k*K + l``
and column ``i*K + j``, so that the two-body energy is
``sum (ij|kl) Gamma_hat[(k,l),(i,j)]`` in chemists' notation.
"""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .coulomb import canonical
from .fock import SymmetryAdaptedState, popcount
from .sto import unitary

DROP = 1e-14


# ---------------------------------------------------------------------------
# spin-orbital matrices
# ---------------------------------------------------------------------------

@dataclass
class SpinOrbitalRDMs:
    """Spin-orbital one- and two-body matrices of ``|psi><chi|``.

    ``gamma1`` maps ``(i, j)`` to ``<chi|a_j^dagger a_i|psi>``; ``gamma2`` maps
    ``(p, r, q, s)`` with ``p < r``, ``q < s`` to
    ``<chi|a_p^dagger a_r^dagger a_s a_q|psi>``.
    """

    norb: int
    gamma1: dict
    gamma2: dict

    def trace1(self) -> float:
        return sum(v for (i, j), v in self.gamma1.items() if i == j)

    def trace2(self) -> float:
        return sum(v for (p, r, q, s), v in self.gamma2.items() if (p, r) == (q, s))

    def element(self, p, r, q, s) -> float:
        """Antisymmetrized lookup for arbitrary index order."""
        if p == r or q == s:
            return 0.0
        sign = 1
        if p > r:
            p, r, sign = r, p, -sign
        if q > s:
            q, s, sign = s, q, -sign
        return sign * self.gamma2.get((p, r, q, s), 0.0)


def _occupied(det: int) -> list[int]:
    out, i = [], 0
    while det:
        if det & 1:
            out.append(i)
        det >>= 1
        i += 1
    return out


def _hole_matrix(coeffs: dict, nholes: int):
    """Sparse ``<D''| a_s a_q |phi>`` (``nholes=2``) or ``<D'| a_q |phi>`` (``nholes=1``).

    Returns the matrix with rows keyed by hole tuples and columns by the
    remaining determinants, plus both key lists.
    """
    rows, cols, vals = [], [], []
    rkey, ckey = {}, {}
    for det in sorted(coeffs):
        c = coeffs[det]
        occ = _occupied(det)
        if nholes == 1:
            for below, q in enumerate(occ):
                r = rkey.setdefault((q,), len(rkey))
                k = ckey.setdefault(det ^ (1 << q), len(ckey))
                rows.append(r)
                cols.append(k)
                vals.append(-c if below & 1 else c)
        else:
            for bq, q in enumerate(occ):
                for bs in range(bq + 1, len(occ)):
                    s = occ[bs]
                    # a_q sees bq electrons below, a_s then sees bs - 1
                    r = rkey.setdefault((q, s), len(rkey))
                    k = ckey.setdefault(det ^ (1 << q) ^ (1 << s), len(ckey))
                    rows.append(r)
                    cols.append(k)
                    vals.append(-c if (bq + bs - 1) & 1 else c)
    return rows, cols, vals, rkey, ckey


def _contract(psi: dict, chi: dict, nholes: int) -> dict:
    """``{(bra hole key, ket hole key): sum_D'' conj(B_chi) B_psi}``."""
    r1, c1, v1, rk1, ck1 = _hole_matrix(psi, nholes)
    r2, c2, v2, rk2, ck2 = _hole_matrix(chi, nholes)
    common = {d: k for k, d in enumerate(sorted(set(ck1) & set(ck2)))}
    if not common:
        return {}
    m1 = _remap(r1, c1, v1, len(rk1), ck1, common)
    m2 = _remap(r2, c2, v2, len(rk2), ck2, common)
    prod = (m2.conj() @ m1.T).tocoo()
    keys1, keys2 = list(rk1), list(rk2)
    out = {}
    for a, b, v in zip(prod.row, prod.col, prod.data):
        if abs(v) > DROP:
            out[(keys2[a], keys1[b])] = v
    return out


def _remap(rows, cols, vals, nrows, ckey, common):
    inv = np.full(len(ckey), -1)
    for d, k in ckey.items():
        if d in common:
            inv[k] = common[d]
    cols = inv[np.asarray(cols, dtype=np.int64)]
    keep = cols >= 0
    return sp.csr_matrix((np.asarray(vals)[keep], (np.asarray(rows)[keep], cols[keep])),
                         shape=(nrows, len(common)))


def _coeffs(state) -> dict:
    if isinstance(state, SymmetryAdaptedState):
        return state.float_coeffs()
    return {int(d): float(c) for d, c in dict(state).items()}


def _subshells(state):
    prov = getattr(state, "provenance", None)
    if prov and hasattr(prov[0], "subshells"):
        return tuple(prov[0].subshells)
    return None


def _core_prefix(dets) -> int:
    """Length of the run of spin orbitals ``0..c-1`` occupied in every determinant."""
    common = -1
    for d in dets:
        common &= d
    c = 0
    while common >> c & 1:
        c += 1
    return c


def rdm_pair(psi, chi, norb: int | None = None, factorize: bool = True) -> SpinOrbitalRDMs:
    """Spin-orbital matrices of ``|psi><chi|``.

    Parameters
    ----------
    psi, chi : SymmetryAdaptedState or mapping det -> coefficient
    norb : int, optional
        Number of spin orbitals; inferred from the determinants when omitted.
    factorize : bool
        Expand only the orbitals above the common fully occupied prefix.

    Raises
    ------
    ValueError
        If the states carry different orbital sets or particle numbers, or a
        determinant does not fit into ``norb`` spin orbitals.
    """
    sa, sb = _subshells(psi), _subshells(chi)
    if sa is not None and sb is not None and sa != sb:
        raise ValueError("states live on different orbital sets")
    a, b = _coeffs(psi), _coeffs(chi)
    counts = {popcount(d) for d in list(a) + list(b)}
    if len(counts) > 1:
        raise ValueError("states have different particle numbers")
    top = max((d.bit_length() for d in list(a) + list(b)), default=0)
    if norb is None:
        norb = top
    elif top > norb:
        raise ValueError("determinant exceeds the orbital set")
    if not a or not b:
        return SpinOrbitalRDMs(norb, {}, {})

    ncore = _core_prefix(list(a) + list(b)) if factorize else 0
    if ncore:
        a = {d >> ncore: c for d, c in a.items()}
        b = {d >> ncore: c for d, c in b.items()}
    g1 = {(q[0] + ncore, p[0] + ncore): v for (p, q), v in _contract(a, b, 1).items()}
    g2 = {(p[0] + ncore, p[1] + ncore, q[0] + ncore, q[1] + ncore): v
          for (p, q), v in _contract(a, b, 2).items()}
    if ncore:
        _add_core(g1, g2, ncore, sum(a[d] * b[d] for d in a if d in b))
    return SpinOrbitalRDMs(norb, g1, g2)


def _add_core(g1: dict, g2: dict, ncore: int, overlap: float):
    """Insert the entries involving core spin orbitals.

    ``g[r, s] = <chi|a_r^dagger a_s|psi>`` over active orbitals is
    ``gamma1[s, r]``; every core orbital lies below every active one.
    """
    active = [((s, r), v) for (s, r), v in g1.items()]
    for c in range(ncore):
        for (s, r), v in active:
            # <a_c^+ a_r^+ a_s a_c> = g[r, s]
            g2[(c, r, c, s)] = g2.get((c, r, c, s), 0.0) + v
    if abs(overlap) > DROP:
        for c in range(ncore):
            g1[(c, c)] = overlap
            for c2 in range(c + 1, ncore):
                g2[(c, c2, c, c2)] = overlap


# ---------------------------------------------------------------------------
# spin tracing
# ---------------------------------------------------------------------------

def _sparse(entries: dict, K: int) -> sp.csr_matrix:
    if not entries:
        return sp.csr_matrix((K * K, K * K))
    keys = np.array(list(entries), dtype=np.int64).reshape(-1, 2)
    vals = np.array(list(entries.values()))
    keep = np.abs(vals) > DROP
    return sp.csr_matrix((vals[keep], (keys[keep, 0], keys[keep, 1])), shape=(K * K, K * K))


@dataclass
class SpinTracedRDMPair:
    """Spin-traced matrices of one state pair.

    Attributes
    ----------
    gamma1 : (K, K) array
    gamma2 : sparse (K*K, K*K)
        ``Gamma_hat`` with row ``k*K + l`` and column ``i*K + j``.
    opposite : sparse (K*K, K*K)
        ``<chi| a_{i up}^+ a_{k down}^+ a_{l down} a_{j up} |psi>`` in the same
        layout.  It is the part of ``gamma2`` that cannot be recovered from
        the spin-summed matrix and is needed to rotate ``gamma2`` exactly.
    basis : str
        ``"spherical"`` or ``"real"``.
    """

    gamma1: np.ndarray
    gamma2: sp.csr_matrix
    opposite: sp.csr_matrix
    basis: str = "spherical"

    @property
    def K(self) -> int:
        return self.gamma1.shape[0]

    def trace1(self):
        return np.trace(self.gamma1)

    def trace2(self):
        K = self.K
        idx = np.arange(K) * (K + 1)
        return self.gamma2[idx][:, idx].sum()

    def spin_summed(self) -> sp.csr_matrix:
        """``P[(k,l),(i,j)] = sum_{ab} <a_{ia}^+ a_{kb}^+ a_{lb} a_{ja}>`` (no ordering)."""
        return (self.gamma2 + self.gamma2.T).tocsr()

    def energy(self, h: np.ndarray, v) -> complex:
        """``tr(h gamma1) + sum (ij|kl) Gamma_hat[(k,l),(i,j)]`` for dense ``v[i,j,k,l]``."""
        K = self.K
        G = self.gamma2.tocoo()
        k, l = np.divmod(G.row, K)
        i, j = np.divmod(G.col, K)
        return np.sum(h * self.gamma1.T) + np.sum(np.asarray(v)[i, j, k, l] * G.data)


def spin_trace(rdms: SpinOrbitalRDMs, nspatial: int | None = None) -> SpinTracedRDMPair:
    """Sum out spins with the ``(i,a) < (k,b)`` ordering of creation pairs.

    Spin orbital ``p`` is spatial orbital ``p // 2`` with spin up for even
    ``p`` (the global ordering of :mod:`atomci.model`).
    """
    K = nspatial if nspatial is not None else (rdms.norb + 1) // 2
    g1 = np.zeros((K, K))
    for (p, q), v in rdms.gamma1.items():
        if (p ^ q) & 1 == 0:
            g1[p >> 1, q >> 1] += v
    full, opp = {}, {}

    def add(store, k, l, i, j, v):
        key = (k * K + l, i * K + j)
        store[key] = store.get(key, 0.0) + v

    for (p, r, q, s), v in rdms.gamma2.items():
        i, a, k, b = p >> 1, p & 1, r >> 1, r & 1
        # annihilators a_{lb} a_{ja}: either (q, s) = (ja, lb) or (s, q) = (ja, lb)
        if q & 1 == a and s & 1 == b:
            add(full, k, s >> 1, i, q >> 1, v)
        if s & 1 == a and q & 1 == b:
            add(full, k, q >> 1, i, s >> 1, -v)
        if a != b and (q ^ s) & 1:
            # creation pair rewritten with the up orbital first
            sign, iu, kd = (1, i, k) if a == 0 else (-1, k, i)
            if q & 1 == 0:
                add(opp, kd, s >> 1, iu, q >> 1, sign * v)
            else:
                add(opp, kd, q >> 1, iu, s >> 1, -sign * v)
    return SpinTracedRDMPair(g1, _sparse(full, K), _sparse(opp, K), "spherical")


# ---------------------------------------------------------------------------
# change of spatial basis
# ---------------------------------------------------------------------------

def basis_unitary(subshells) -> np.ndarray:
    """Block-diagonal ``U`` taking spherical to real orbitals, subshell by subshell."""
    return scipy.linalg.block_diag(*[unitary(s.l) for s in subshells])


def _ordered_mask(M: sp.spmatrix, K: int, strict: bool) -> sp.csr_matrix:
    M = M.tocoo()
    k = M.row // K
    i = M.col // K
    keep = (i < k) if strict else (i == k)
    keep &= np.abs(M.data) > DROP
    return sp.csr_matrix((M.data[keep], (M.row[keep], M.col[keep])), shape=M.shape)


def transform_to_real_basis(rdm: SpinTracedRDMPair, U: np.ndarray) -> SpinTracedRDMPair:
    """Rotate a spherical-basis pair to the real orbitals ``Z_a = sum_m U[a, m] Y_m``.

    ``gamma1 -> conj(U) gamma1 U^T``.  The spin-summed two-body matrix and the
    opposite-spin block both transform with ``W = U (x) conj(U)`` on rows and
    columns; ``Gamma_hat`` is then reassembled with the ordering rule in the
    new basis, so the result is exactly what :func:`spin_trace` would give for
    states written over real orbitals.
    """
    if rdm.basis != "spherical":
        raise ValueError(f"RDM pair is already in the {rdm.basis} basis")
    U = np.asarray(U)
    K = rdm.K
    if U.shape != (K, K):
        raise ValueError("unitary does not match the orbital count")
    g1 = U.conj() @ rdm.gamma1 @ U.T
    W = sp.csr_matrix(np.kron(U, U.conj()))
    W.data[np.abs(W.data) < DROP] = 0
    W.eliminate_zeros()
    P = W @ rdm.spin_summed() @ W.T
    X = W @ rdm.opposite @ W.T
    G = (_ordered_mask(P, K, True) + _ordered_mask(X, K, False)).tocsr()
    X = X.tocsr()
    X.data[np.abs(X.data) <= DROP] = 0
    X.eliminate_zeros()
    return SpinTracedRDMPair(g1, G, X, "real")


# ---------------------------------------------------------------------------
# stacked pair matrices for Hamiltonian assembly
# ---------------------------------------------------------------------------

CACHE_MAGIC = b"ATOMCI-RDM\x00"
CACHE_VERSION = 1


@dataclass
class RDMStack:
    """Real-basis pair matrices of a whole subspace, folded onto integrals.

    Row ``r`` belongs to the state pair ``pairs[r] = (a, b)`` with ``a <= b``
    and yields ``H[a, b] = <psi_a|H|psi_b>`` as::

        one_body[r] @ h.ravel() + two_body[r] @ v

    where ``v[c] = (ij|kl)`` for ``quadruples[c]`` (canonical order), i.e.
    all symmetry-equivalent positions of ``Gamma_hat`` are summed up front.
    """

    dim: int
    nspatial: int
    pairs: list
    one_body: sp.csr_matrix
    two_body: sp.csr_matrix
    quadruples: list
    nnz: list | None = None
    basis: str = "real"

    def _unpack(self, values: np.ndarray) -> np.ndarray:
        H = np.zeros((self.dim, self.dim), dtype=values.dtype)
        for (a, b), x in zip(self.pairs, values):
            H[a, b] = x
            H[b, a] = np.conj(x)
        return H

    def one_body_matrix(self, h: np.ndarray) -> np.ndarray:
        return self._unpack(self.one_body @ np.asarray(h).ravel())

    def two_body_matrix(self, v: np.ndarray) -> np.ndarray:
        return self._unpack(self.two_body @ np.asarray(v))

    def save(self, path) -> None:
        """Write the magic header, version and an ``npz`` payload."""
        buf = io.BytesIO()
        o, t = self.one_body.tocoo(), self.two_body.tocoo()
        np.savez_compressed(
            buf, dim=self.dim, nspatial=self.nspatial, pairs=np.array(self.pairs, dtype=np.int64).reshape(-1, 2),
            o_row=o.row, o_col=o.col, o_val=o.data, o_shape=o.shape,
            t_row=t.row, t_col=t.col, t_val=t.data, t_shape=t.shape,
            quads=np.array(self.quadruples, dtype=np.int64).reshape(-1, 4),
            nnz=np.array(self.nnz or [], dtype=np.int64), basis=self.basis)
        path = os.fspath(path)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(CACHE_MAGIC + CACHE_VERSION.to_bytes(4, "little") + buf.getvalue())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "RDMStack":
        with open(path, "rb") as fh:
            raw = fh.read()
        head = len(CACHE_MAGIC)
        if raw[:head] != CACHE_MAGIC:
            raise ValueError(f"{path}: not an RDM cache file")
        version = int.from_bytes(raw[head:head + 4], "little")
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: cache version {version}, expected {CACHE_VERSION}")
        z = np.load(io.BytesIO(raw[head + 4:]))
        one = sp.csr_matrix((z["o_val"], (z["o_row"], z["o_col"])), shape=tuple(z["o_shape"]))
        two = sp.csr_matrix((z["t_val"], (z["t_row"], z["t_col"])), shape=tuple(z["t_shape"]))
        return cls(int(z["dim"]), int(z["nspatial"]), [tuple(p) for p in z["pairs"].tolist()],
                   one, two, [tuple(q) for q in z["quads"].tolist()], z["nnz"].tolist() or None,
                   str(z["basis"]))


def build_rdm_stack(states, subshells, real: bool = True) -> RDMStack:
    """Pair matrices of all ``a <= b`` state pairs, rotated to real orbitals.

    Parameters
    ----------
    states : sequence of SymmetryAdaptedState
    subshells : sequence of Subshell
        Orbital set the determinants refer to.
    real : bool
        Rotate to the real-harmonic basis used by the integral code.
    """
    K = sum(2 * s.l + 1 for s in subshells)
    U = basis_unitary(subshells) if real else None
    n = len(states)
    pairs = [(a, b) for a in range(n) for b in range(a, n)]
    rows1, cols1, vals1 = [], [], []
    entries = []
    nnz = []
    for r, (a, b) in enumerate(pairs):
        t = spin_trace(rdm_pair(states[b], states[a], norb=2 * K), K)
        nnz.append(int(t.gamma2.nnz))
        if real:
            t = transform_to_real_basis(t, U)
        g1 = t.gamma1
        ii, jj = np.nonzero(np.abs(g1) > DROP)
        # tr(h gamma) = sum h[i, j] gamma[j, i]
        rows1.extend([r] * len(ii))
        cols1.extend((jj * K + ii).tolist())
        vals1.extend(g1[ii, jj].tolist())
        G = t.gamma2.tocoo()
        k, l = np.divmod(G.row, K)
        i, j = np.divmod(G.col, K)
        for x in zip(i.tolist(), j.tolist(), k.tolist(), l.tolist(), G.data.tolist()):
            entries.append((r,) + x)
    quads = sorted({canonical(i, j, k, l) for _, i, j, k, l, _ in entries})
    qpos = {q: c for c, q in enumerate(quads)}
    rows2 = [e[0] for e in entries]
    cols2 = [qpos[canonical(*e[1:5])] for e in entries]
    vals2 = [e[5] for e in entries]
    dtype = complex if real else float
    one = sp.csr_matrix((np.array(vals1, dtype=dtype), (rows1, cols1)), shape=(len(pairs), K * K))
    two = sp.csr_matrix((np.array(vals2, dtype=dtype), (rows2, cols2)), shape=(len(pairs), len(quads)))
    one.sum_duplicates()
    two.sum_duplicates()
    for m in (one, two):
        m.data[np.abs(m.data) <= DROP] = 0
        m.eliminate_zeros()
    return RDMStack(n, K, pairs, one, two, quads, nnz, "real" if real else "spherical")
