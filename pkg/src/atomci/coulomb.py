"""Two-electron Coulomb integrals of dilated Slater orbitals via Fourier space.

For real pair products ``f = sum_nu r^nu (sum_q c_{nu,q} x^q) exp(-lam r)``
the Coulomb energy ``(f|g)`` reduces to

    sum c_{nu,q} c'_{nu',q'} (-1)^(nu+nu') d^nu/dlam^nu d^nu'/dmu^nu' I_{q,q'}(lam, mu)

with

    I_{q,q'} = (-i)^|q| i^|q'| / (2 pi^2)
               * int d^q F_lam(k) d^q' F_mu(k) dOmega dk,   F_lam = 8 pi lam / (lam^2 + k^2)^2.

Everything up to the final float evaluation is exact: derivatives of
``F_lam`` are sums of ``k^a (lam^2+k^2)^-M``, the angular integral of a
monomial is a rational multiple of ``pi`` and the remaining radial integrals
are rational functions of ``lam`` and ``mu`` whose denominators contain only
``lam``, ``mu`` and ``lam + mu`` (no ``lam - mu``, so no confluent special
case is needed).  ``I_{q,q'}`` and its derivatives are therefore stored as
:class:`LamMu` expressions and compiled once into stable numeric evaluators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .sto import STOBasis, monomial_product, real_harmonics


def _double_factorial(n: int) -> int:
    return 1 if n <= 0 else math.prod(range(n, 0, -2))


# --- angular integrals ----------------------------------------------------------

@lru_cache(maxsize=None)
def angular_monomial_integral(a: tuple[int, int, int]) -> Fraction:
    """``int_{S^2} xhat^a dOmega`` as a rational multiple of ``pi``.

    Zero if any exponent is odd, else ``4 prod (a_i - 1)!! / (|a| + 1)!!``.
    """
    if any(x % 2 for x in a):
        return Fraction(0)
    num = 4 * math.prod(_double_factorial(x - 1) for x in a)
    return Fraction(num, _double_factorial(sum(a) + 1))


# --- rational functions of (lam, mu) ----------------------------------------------

class LamMu:
    """Exact ``sum c * lam^x * mu^y * (lam + mu)^-z`` with integer ``x, y`` and ``z >= 0``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def monomial(cls, x=0, y=0, z=0, c=1) -> "LamMu":
        return cls({(x, y, z): c})

    def __add__(self, other: "LamMu") -> "LamMu":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LamMu(out)

    def __sub__(self, other: "LamMu") -> "LamMu":
        return self + other.scale(-1)

    def scale(self, c) -> "LamMu":
        return LamMu({k: v * c for k, v in self.terms.items()})

    def shift(self, dx=0, dy=0, dz=0) -> "LamMu":
        """Multiply by ``lam^dx mu^dy (lam+mu)^-dz``."""
        return LamMu({(x + dx, y + dy, z + dz): v for (x, y, z), v in self.terms.items()})

    def __mul__(self, other: "LamMu") -> "LamMu":
        out: dict = {}
        for (x1, y1, z1), a in self.terms.items():
            for (x2, y2, z2), b in other.terms.items():
                k = (x1 + x2, y1 + y2, z1 + z2)
                out[k] = out.get(k, 0) + a * b
        return LamMu(out)

    def d_lam(self) -> "LamMu":
        out: dict = {}
        for (x, y, z), c in self.terms.items():
            if x:
                k = (x - 1, y, z)
                out[k] = out.get(k, 0) + c * x
            if z:
                k = (x, y, z + 1)
                out[k] = out.get(k, 0) - c * z
        return LamMu(out)

    def d_mu(self) -> "LamMu":
        return self.swap().d_lam().swap()

    def swap(self) -> "LamMu":
        """Exchange the roles of ``lam`` and ``mu``."""
        return LamMu({(y, x, z): c for (x, y, z), c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int | None:
        """Homogeneity degree, or None if the expression is not homogeneous."""
        degs = {x + y - z for x, y, z in self.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else 0

    def __call__(self, lam, mu):
        lam, mu = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
        out = np.zeros(np.broadcast(lam, mu).shape)
        for (x, y, z), c in self.terms.items():
            out = out + float(c) * lam ** x * mu ** y * (lam + mu) ** (-z)
        return out

    def evaluate_exact(self, lam, mu) -> Fraction:
        lam, mu = Fraction(lam), Fraction(mu)
        return sum((c * lam ** x * mu ** y / (lam + mu) ** z for (x, y, z), c in self.terms.items()),
                   Fraction(0))

    def __eq__(self, other):
        return isinstance(other, LamMu) and self.terms == other.terms

    def __repr__(self):
        return f"LamMu({len(self.terms)} terms)"


class CompiledLamMu:
    """Numerically stable evaluator of a homogeneous :class:`LamMu`.

    With ``S = lam + mu``, ``t = lam/S`` and ``u = mu/S`` a homogeneous
    expression of degree ``D`` equals ``S^D t^a u^b N(t)`` for a polynomial
    ``N``.  Common factors of ``t`` and ``u = 1 - t`` are cancelled exactly and
    ``N`` is evaluated in the Bernstein basis ``t^k u^(d-k)``, which avoids the
    cancellation between individual terms when ``lam`` and ``mu`` differ by
    orders of magnitude.
    """

    def __init__(self, expr: LamMu):
        self.zero = expr.is_zero()
        if self.zero:
            return
        D = expr.degree()
        if D is None:
            raise ValueError("expression is not homogeneous")
        a = min(x for x, _, _ in expr.terms)
        b = min(y for _, y, _ in expr.terms)
        # N(t) = sum c t^(x-a) (1-t)^(y-b), exact polynomial in t
        deg = max(x - a + y - b for x, y, _ in expr.terms)
        poly = [Fraction(0)] * (deg + 1)
        for (x, y, _), c in expr.terms.items():
            px, py = x - a, y - b
            for j in range(py + 1):
                poly[px + j] += c * math.comb(py, j) * (-1) ** j
        poly = _trim(poly)
        while len(poly) > 1 and poly[0] == 0:
            poly = poly[1:]
            a += 1
        while len(poly) > 1 and sum(poly) == 0:
            poly = _divide_one_minus_t(poly)
            b += 1
        d = len(poly) - 1
        # Bernstein coefficients beta_k, N = sum beta_k C(d,k) t^k u^(d-k)
        beta = [sum((Fraction(math.comb(k, i), math.comb(d, i)) * poly[i] for i in range(k + 1)),
                    Fraction(0)) for k in range(d + 1)]
        self.D, self.a, self.b, self.d = D, a, b, d
        self.weights = np.array([float(beta[k] * math.comb(d, k)) for k in range(d + 1)])

    def __call__(self, lam, mu):
        lam, mu = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
        if self.zero:
            return np.zeros(np.broadcast(lam, mu).shape)
        S = lam + mu
        t, u = lam / S, mu / S
        k = np.arange(self.d + 1).reshape((-1,) + (1,) * t.ndim)
        basis = t[None] ** k * u[None] ** (self.d - k)
        return S ** self.D * t ** self.a * u ** self.b * np.tensordot(self.weights, basis, axes=1)


def _trim(poly):
    while len(poly) > 1 and poly[-1] == 0:
        poly = poly[:-1]
    return poly


def _divide_one_minus_t(poly):
    """Exact quotient ``poly(t) / (1 - t)`` for a polynomial with ``poly(1) = 0``."""
    # poly = (1 - t) q  ->  q_k = sum_{i<=k} poly_i
    q, acc = [], Fraction(0)
    for c in poly[:-1]:
        acc += c
        q.append(acc)
    return _trim(q)


# --- radial integrals -----------------------------------------------------------------

def _single_factor(n: int, b: int, on_mu: bool) -> LamMu:
    """``int_0^inf k^n (c^2 + k^2)^-b dk / pi`` with ``c = mu`` or ``lam``."""
    a = n // 2
    coef = Fraction(_double_factorial(2 * a - 1) * _double_factorial(2 * b - 2 * a - 3),
                    2 ** b * math.factorial(b - 1))
    e = 2 * a + 1 - 2 * b
    return LamMu.monomial(0, e, 0, coef) if on_mu else LamMu.monomial(e, 0, 0, coef)


def _inv_d_square_lam(expr: LamMu) -> LamMu:
    """``d/d(lam^2) = (1/(2 lam)) d/dlam``."""
    return expr.d_lam().shift(dx=-1).scale(Fraction(1, 2))


@lru_cache(maxsize=None)
def radial_form(n: int, m: int, m2: int) -> LamMu:
    """``int_0^inf k^n / ((lam^2+k^2)^m (mu^2+k^2)^m2) dk`` divided by ``pi``.

    Only even ``n`` occur for Coulomb integrals; odd ``n`` raise.
    """
    if n % 2 or n < 0 or m < 0 or m2 < 0:
        raise ValueError("radial integrand needs even n >= 0 and m, m2 >= 0")
    if n >= 2 * (m + m2) - 1:
        raise ValueError(f"divergent radial integral n={n}, m={m}, m2={m2}")
    if m == 0:
        return _single_factor(n, m2, on_mu=True)
    if m2 == 0:
        return _single_factor(n, m, on_mu=False)
    if n:
        # k^2 = (lam^2 + k^2) - lam^2
        return radial_form(n - 2, m - 1, m2) - radial_form(n - 2, m, m2).shift(dx=2)
    if m > 1:
        return _inv_d_square_lam(radial_form(0, m - 1, m2)).scale(Fraction(-1, m - 1))
    if m2 > 1:
        return radial_form(0, m2, m).swap()
    # int dk / ((lam^2 + k^2)(mu^2 + k^2)) = pi / (2 lam mu (lam + mu))
    return LamMu.monomial(-1, -1, 1, Fraction(1, 2))


def radial_rational_integral(n: int, m: int, m2: int, lam: float, mu: float) -> float:
    """``int_0^inf k^n / ((lam^2+k^2)^m (mu^2+k^2)^m2) dk``."""
    if lam <= 0 or mu <= 0:
        raise ValueError("lam and mu must be positive")
    return math.pi * float(CompiledLamMu(radial_form(n, m, m2))(lam, mu))


# --- Fourier kernels ------------------------------------------------------------------

@dataclass(frozen=True)
class FourierKernel:
    """``d^q/dk^q [8 pi lam / (lam^2 + k^2)^2]``.

    ``terms`` holds ``(c, e, a, M)`` meaning ``c pi lam^e k^a (lam^2+k^2)^-M``.
    """

    q: tuple[int, int, int]
    terms: tuple

    @property
    def m(self) -> int:
        """Exponent of the common denominator, ``2 + |q|``."""
        return 2 + sum(self.q)

    def numerator(self) -> dict:
        """``P`` with ``kernel = pi P(k, lam) / (lam^2 + k^2)^m``, as ``{(e, a): c}``.

        ``e`` is the power of ``lam`` and ``a`` the exponent triple of ``k``.
        """
        out: dict = {}
        for c, e, a, M in self.terms:
            # multiply by (lam^2 + k1^2 + k2^2 + k3^2)^(m - M)
            r = self.m - M
            for js in itertools.product(range(r + 1), repeat=4):
                if sum(js) != r:
                    continue
                mult = math.factorial(r) // math.prod(math.factorial(j) for j in js)
                key = (e + 2 * js[0], (a[0] + 2 * js[1], a[1] + 2 * js[2], a[2] + 2 * js[3]))
                out[key] = out.get(key, 0) + c * mult
        return {k: v for k, v in sorted(out.items()) if v != 0}

    def __call__(self, k, lam: float) -> np.ndarray:
        k = np.atleast_2d(np.asarray(k, dtype=float))
        k2 = (k ** 2).sum(axis=1)
        out = np.zeros(len(k))
        for c, e, a, M in self.terms:
            out += float(c) * lam ** e * k[:, 0] ** a[0] * k[:, 1] ** a[1] * k[:, 2] ** a[2] \
                * (lam * lam + k2) ** (-M)
        return math.pi * out


@lru_cache(maxsize=None)
def fourier_derivative(q: tuple[int, int, int]) -> FourierKernel:
    """Exact ``d^q`` of the Fourier transform of ``exp(-lam r)``.

    Uses ``d^n/dx^n g(x^2 + c) = sum_j n!/(j!(n-2j)!) (2x)^(n-2j) g^(n-j)``
    per coordinate with ``g(s) = 8 pi lam (lam^2 + s)^-2``, whose ``m``-th
    derivative is ``8 pi lam (-1)^m (m+1)! (lam^2 + s)^-(2+m)``.
    """
    q = tuple(int(x) for x in q)
    if any(x < 0 for x in q):
        raise ValueError("derivative orders must be non-negative")
    per_axis = []
    for n in q:
        per_axis.append([(j, Fraction(math.factorial(n), math.factorial(j) * math.factorial(n - 2 * j))
                          * 2 ** (n - 2 * j), n - 2 * j) for j in range(n // 2 + 1)])
    out: dict = {}
    for combo in itertools.product(*per_axis):
        jtot = sum(t[0] for t in combo)
        mder = sum(q) - jtot
        c = math.prod(t[1] for t in combo) * 8 * (-1) ** mder * math.factorial(mder + 1)
        key = (1, tuple(t[2] for t in combo), 2 + mder)
        out[key] = out.get(key, 0) + c
    terms = tuple((c, e, a, M) for (e, a, M), c in sorted(out.items()) if c != 0)
    return FourierKernel(q, terms)


# --- I_{q,q'} ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def i_form(q: tuple[int, int, int], q2: tuple[int, int, int]) -> LamMu:
    """``I_{q,q'}(lam, mu) / pi^2`` as an exact :class:`LamMu`."""
    total = tuple(a + b for a, b in zip(q, q2))
    if any(x % 2 for x in total):
        return LamMu()
    phase = -1 if ((sum(q2) - sum(q)) // 2) % 2 else 1
    out = LamMu()
    for c1, e1, a1, M1 in fourier_derivative(q).terms:
        for c2, e2, a2, M2 in fourier_derivative(q2).terms:
            a = tuple(x + y for x, y in zip(a1, a2))
            ang = angular_monomial_integral(a)
            if not ang:
                continue
            rad = radial_form(sum(a), M1, M2)
            out = out + rad.shift(dx=e1, dy=e2).scale(Fraction(phase, 2) * c1 * c2 * ang)
    return out


@lru_cache(maxsize=None)
def _compiled_i(q, q2, i: int, j: int) -> CompiledLamMu:
    expr = i_form(q, q2)
    for _ in range(i):
        expr = expr.d_lam()
    for _ in range(j):
        expr = expr.d_mu()
    return CompiledLamMu(expr.scale((-1) ** (i + j)))


def I_integral(q, q2, lam: float, mu: float, i: int = 0, j: int = 0) -> float:
    """``(-1)^(i+j) d^i/dlam^i d^j/dmu^j I_{q,q'}(lam, mu)``."""
    if i < 0 or j < 0 or i > 12 or j > 12:
        raise ValueError("unsupported derivative order")
    return math.pi ** 2 * float(_compiled_i(tuple(q), tuple(q2), i, j)(lam, mu))


# --- angular signatures ------------------------------------------------------------------

def _harmonic(l: int, a: int):
    return real_harmonics(l)[a]


@lru_cache(maxsize=None)
def _pair_shape(h1: tuple[int, int], h2: tuple[int, int]) -> tuple:
    """Exact monomial polynomial of ``Z_h1 Z_h2`` without the norm prefactors."""
    a, b = _harmonic(*h1), _harmonic(*h2)
    return tuple(monomial_product(dict(a.coeffs), dict(b.coeffs)).items())


@lru_cache(maxsize=None)
def omega_form(pair1: tuple, pair2: tuple) -> LamMu:
    """``sum_{p,q} c_p c_q I_{p,q} / pi^2`` for two harmonic pairs (shape only)."""
    out = LamMu()
    for p, cp in _pair_shape(*pair1):
        for q, cq in _pair_shape(*pair2):
            f = i_form(p, q)
            if not f.is_zero():
                out = out + f.scale(cp * cq)
    return out


@lru_cache(maxsize=None)
def compiled_omega(pair1: tuple, pair2: tuple, i: int, j: int) -> CompiledLamMu:
    expr = omega_form(pair1, pair2)
    for _ in range(i):
        expr = expr.d_lam()
    for _ in range(j):
        expr = expr.d_mu()
    return CompiledLamMu(expr.scale((-1) ** (i + j)))


# --- tensors ----------------------------------------------------------------------------

def canonical(i, j, k, l) -> tuple[int, int, int, int]:
    """Representative of the 8-fold symmetry class of ``(ij|kl)``."""
    if i > j:
        i, j = j, i
    if k > l:
        k, l = l, k
    if (i, j) > (k, l):
        i, j, k, l = k, l, i, j
    return i, j, k, l


def canonical_quadruples(K: int) -> list[tuple[int, int, int, int]]:
    pairs = [(i, j) for i in range(K) for j in range(i, K)]
    return [p + r for a, p in enumerate(pairs) for r in pairs[a:]]


def _odd_parity(basis: STOBasis, quad) -> bool:
    """True if the total Cartesian parity makes the integral vanish."""
    tot = [0, 0, 0]
    for k in quad:
        h = basis.orbitals[k][1]
        p = h.coeffs[0][0]  # every monomial of a harmonic has the same parity pattern
        for x in range(3):
            tot[x] += p[x]
    return any(x % 2 for x in tot)


class CoulombPlan:
    """Exponent-independent part of a set of Coulomb integrals.

    Integrals are grouped by angular signature (the four real harmonics).
    For each group the compiled ``Omega`` derivatives are fetched once; an
    evaluation then only needs the radial data of the current basis.
    """

    def __init__(self, basis: STOBasis, quadruples: Iterable | None = None):
        K = basis.nspatial
        quads = canonical_quadruples(K) if quadruples is None else \
            sorted({canonical(*q) for q in quadruples})
        self.subshells = basis.subshells
        self.quadruples = quads
        subs = basis.subshells
        sub_index = {s: k for k, s in enumerate(subs)}
        self.orb_sub = np.array([sub_index[s] for s, _ in basis.orbitals])
        self.orb_h = [(h.l, h.index) for _, h in basis.orbitals]
        self.orb_norm = np.array([h.norm for _, h in basis.orbitals])
        ns = len(subs)
        self.radial_pairs = [(a, b) for a in range(ns) for b in range(a, ns)]
        rp_index = {p: k for k, p in enumerate(self.radial_pairs)}
        self.nu_max = max(2 * (s.n - s.l - 1) for s in subs)
        groups: dict = {}
        for slot, (i, j, k, l) in enumerate(quads):
            if _odd_parity(basis, (i, j, k, l)):
                continue
            sig = (tuple(sorted((self.orb_h[i], self.orb_h[j]))),
                   tuple(sorted((self.orb_h[k], self.orb_h[l]))))
            r1 = rp_index[tuple(sorted((self.orb_sub[i], self.orb_sub[j])))]
            r2 = rp_index[tuple(sorted((self.orb_sub[k], self.orb_sub[l])))]
            norm = self.orb_norm[[i, j, k, l]].prod()
            groups.setdefault(sig, []).append((slot, r1, r2, norm))
        self.groups = []
        for sig, items in sorted(groups.items()):
            slots, r1, r2, norm = (np.array(x) for x in zip(*items))
            nu1 = max(self._nu(self.radial_pairs[r]) for r in set(r1.tolist()))
            nu2 = max(self._nu(self.radial_pairs[r]) for r in set(r2.tolist()))
            evals = [[compiled_omega(sig[0], sig[1], a, b) for b in range(nu2 + 1)]
                     for a in range(nu1 + 1)]
            self.groups.append((slots, r1, r2, norm, _flatten_group(evals, r1, r2)))

    def _nu(self, rp) -> int:
        a, b = (self.subshells[x] for x in rp)
        return (a.n - a.l - 1) + (b.n - b.l - 1)

    def evaluate(self, basis: STOBasis) -> np.ndarray:
        """Values of all planned integrals, aligned with :attr:`quadruples`."""
        if basis.subshells != self.subshells:
            raise ValueError("basis does not match the plan")
        subs = basis.subshells
        nr = len(self.radial_pairs)
        lam = np.empty(nr)
        coef = np.zeros((nr, self.nu_max + 1))
        for k, (a, b) in enumerate(self.radial_pairs):
            sa, sb = subs[a], subs[b]
            lam[k] = basis.alpha(sa) + basis.alpha(sb)
            c = basis.s[sa] * basis.s[sb] * np.convolve(basis.d[sa], basis.d[sb])
            coef[k, :len(c)] = c
        out = np.zeros(len(self.quadruples))
        for slots, r1, r2, norm, g in self.groups:
            L, M = lam[g.u1], lam[g.u2]
            S = L + M
            t, u = L / S, M / S
            vals = g.w[:, None] * t[None] ** g.p[:, None] * u[None] ** g.q[:, None] * S[None] ** g.D[:, None]
            E = np.add.reduceat(vals, g.starts, axis=0)  # (derivative pair, unique radial pair)
            C = coef[r1][:, g.a] * coef[r2][:, g.b]      # (slot, derivative pair)
            acc = np.einsum("nk,kn->n", C, E[:, g.inverse])
            out[slots] = math.pi ** 2 * norm * acc
        return out


@dataclass
class _FlatGroup:
    """All Bernstein terms of one angular group as flat arrays.

    Term ``x`` contributes ``w t^p u^q S^D`` to derivative pair ``(a, b)``;
    terms are sorted by pair and ``starts`` marks the first term of each.
    """

    a: np.ndarray
    b: np.ndarray
    starts: np.ndarray
    w: np.ndarray
    p: np.ndarray
    q: np.ndarray
    D: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    inverse: np.ndarray


def _flatten_group(evals, r1, r2) -> _FlatGroup:
    a_idx, b_idx, starts, w, p, q, D = [], [], [], [], [], [], []
    for a, row in enumerate(evals):
        for b, ev in enumerate(row):
            if ev.zero:
                continue
            a_idx.append(a)
            b_idx.append(b)
            starts.append(len(w))
            for k, wk in enumerate(ev.weights):
                w.append(wk)
                p.append(ev.a + k)
                q.append(ev.b + ev.d - k)
                D.append(ev.D)
    pairs = np.stack([r1, r2])
    uniq, inverse = np.unique(pairs, axis=1, return_inverse=True)
    ints = lambda x: np.array(x, dtype=np.int64)
    if not a_idx:
        # every derivative vanishes: keep one zero term so the shapes work out
        a_idx, b_idx, starts, w, p, q, D = [0], [0], [0], [0.0], [0], [0], [0]
    return _FlatGroup(ints(a_idx), ints(b_idx), ints(starts), np.array(w, dtype=float), ints(p),
                      ints(q), ints(D), uniq[0], uniq[1], np.asarray(inverse).reshape(-1))


class CoulombTensor:
    """Canonical-wedge storage of ``(ij|kl)`` with symmetric lookup."""

    def __init__(self, K: int, values: Mapping[tuple, float]):
        self.K = K
        self.values = dict(values)

    def __getitem__(self, idx) -> float:
        return self.values.get(canonical(*idx), 0.0)

    def __len__(self):
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        K = self.K
        out = np.zeros((K, K, K, K))
        for (i, j, k, l), v in self.values.items():
            for a, b, c, d in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                               (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
                out[a, b, c, d] = v
        return out

    def dump(self, labels: Sequence[str]) -> dict:
        """Structured form for debugging and regression baselines."""
        return {"labels": list(labels),
                "integrals": [[list(k), v] for k, v in sorted(self.values.items())]}


def build_tensor(basis: STOBasis, quadruples: Iterable | None = None,
                 plan: CoulombPlan | None = None) -> CoulombTensor:
    """All canonical ``(ij|kl)`` (or the requested subset) for ``basis``."""
    plan = plan or CoulombPlan(basis, quadruples)
    vals = plan.evaluate(basis)
    return CoulombTensor(basis.nspatial, dict(zip(plan.quadruples, vals.tolist())))


def coulomb_integral(basis: STOBasis, i: int, j: int, k: int, l: int) -> float:
    """Single ``(ij|kl)`` between real spatial orbitals of ``basis``."""
    return float(CoulombPlan(basis, [(i, j, k, l)]).evaluate(basis)[0])
