import itertools
import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from atomci.angular import single_particle_matrices
from atomci.fock import Configuration, SymmetryAdaptedState, annihilate, create
from atomci.lsdecomp import decompose_configuration, target_subspace
from atomci.model import ModelSpec, OrbitalSpace
from atomci.rdm import (SpinTracedRDMPair, basis_unitary, rdm_pair, spin_trace,
                        transform_to_real_basis)


# --- brute-force oracle ---------------------------------------------------------------

def apply_string(ops, state: dict) -> dict:
    """Apply ``ops`` (rightmost first) given as ``('c'|'a', index)``."""
    out = dict(state)
    for kind, i in reversed(ops):
        nxt = {}
        for d, c in out.items():
            r = create(d, i) if kind == "c" else annihilate(d, i)
            if r is not None:
                nxt[r[0]] = nxt.get(r[0], 0) + r[1] * c
        out = nxt
    return out


def braket(chi: dict, ops, psi: dict):
    res = apply_string(ops, psi)
    return sum(np.conj(chi.get(d, 0)) * c for d, c in res.items())


def brute_rdms(psi: dict, chi: dict, norb: int):
    g1 = {}
    for i in range(norb):
        for j in range(norb):
            v = braket(chi, [("c", j), ("a", i)], psi)
            if abs(v) > 1e-14:
                g1[(i, j)] = v
    g2 = {}
    for p, r in itertools.combinations(range(norb), 2):
        for q, s in itertools.combinations(range(norb), 2):
            v = braket(chi, [("c", p), ("c", r), ("a", s), ("a", q)], psi)
            if abs(v) > 1e-14:
                g2[(p, r, q, s)] = v
    return g1, g2


def assert_dicts_close(a: dict, b: dict, atol=1e-12):
    for k in set(a) | set(b):
        assert a.get(k, 0) == pytest.approx(b.get(k, 0), abs=atol), k


def random_state(rng, norb, N, ndet, core=0):
    dets = set()
    while len(dets) < ndet:
        occ = rng.choice(np.arange(core, norb), N - core, replace=False)
        dets.add(sum(1 << int(o) for o in occ) | ((1 << core) - 1))
    v = rng.normal(size=ndet)
    v /= np.linalg.norm(v)
    return dict(zip(sorted(dets), v))


# --- spin-orbital matrices ------------------------------------------------------------

def test_single_determinant_occupations():
    det = 0b101101
    r = rdm_pair({det: 1.0}, {det: 1.0}, norb=6)
    assert r.gamma1 == {(0, 0): 1.0, (2, 2): 1.0, (3, 3): 1.0, (5, 5): 1.0}


def test_double_excitation_single_entry():
    psi = {0b0011: 1.0}
    chi = {0b1100: 1.0}
    r = rdm_pair(psi, chi, norb=4)
    assert r.gamma1 == {}
    assert len(r.gamma2) == 1
    (key, val), = r.gamma2.items()
    assert key == (2, 3, 0, 1) and abs(val) == 1


def test_traces_six_electrons():
    rng = np.random.default_rng(3)
    psi = random_state(rng, 12, 6, 25)
    r = rdm_pair(psi, psi)
    assert r.trace1() == pytest.approx(6, abs=1e-12)
    assert r.trace2() == pytest.approx(15, abs=1e-12)
    t = spin_trace(r)
    assert t.trace1() == pytest.approx(6, abs=1e-12)
    assert t.trace2() == pytest.approx(15, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 4))
def test_against_operator_strings(seed, core):
    rng = np.random.default_rng(seed)
    norb, N = 8, 4
    psi = random_state(rng, norb, N, 5, core=min(core, 3))
    chi = random_state(rng, norb, N, 5, core=min(core, 3))
    g1, g2 = brute_rdms(psi, chi, norb)
    for factorize in (False, True):
        r = rdm_pair(psi, chi, norb=norb, factorize=factorize)
        assert_dicts_close(r.gamma1, g1)
        assert_dicts_close(r.gamma2, g2)


def test_factorized_route_on_symmetry_states():
    spec = ModelSpec(8, 8, "1s", "2p", target=(1, 1, 1))
    sub = target_subspace(spec)
    for a in sub.states:
        for b in sub.states:
            full = rdm_pair(a, b, factorize=False)
            fact = rdm_pair(a, b)
            assert_dicts_close(full.gamma1, fact.gamma1)
            assert_dicts_close(full.gamma2, fact.gamma2)


def test_hermiticity():
    rng = np.random.default_rng(11)
    psi = random_state(rng, 10, 4, 12, core=2)
    chi = random_state(rng, 10, 4, 12, core=2)
    r, s = rdm_pair(psi, chi), rdm_pair(chi, psi)
    assert_dicts_close(r.gamma1, {(j, i): np.conj(v) for (i, j), v in s.gamma1.items()})
    assert_dicts_close(r.gamma2, {(q, s_, p, r_): np.conj(v) for (p, r_, q, s_), v in s.gamma2.items()})


def test_partial_trace():
    rng = np.random.default_rng(5)
    norb, N = 10, 4
    psi = random_state(rng, norb, N, 20)
    r = rdm_pair(psi, psi)
    for p in range(norb):
        for q in range(norb):
            part = sum(r.element(p, x, q, x) for x in range(norb))
            assert part == pytest.approx((N - 1) * r.gamma1.get((q, p), 0.0), abs=1e-12)


def test_space_mismatch():
    with pytest.raises(ValueError):
        rdm_pair({0b11: 1.0}, {0b111: 1.0})
    with pytest.raises(ValueError):
        rdm_pair({0b110000: 1.0}, {0b110000: 1.0}, norb=4)
    a = target_subspace(ModelSpec(2, 2, None, "2s", target=(0, 0, 1))).states[0]
    b = target_subspace(ModelSpec(2, 2, None, "2p", target=(0, 0, 1))).states[0]
    with pytest.raises(ValueError):
        rdm_pair(a, b)


# --- symmetry commutation -------------------------------------------------------------

def _one_body(space: OrbitalSpace, name: str) -> np.ndarray:
    n = space.norb
    out = np.zeros((n, n))
    for sub, off in zip(space.subshells, space.offsets):
        m = single_particle_matrices(sub.l)[name]
        k = len(m)
        out[off:off + k, off:off + k] = [[float(x) for x in row] for row in m]
    return out


def _two_particle(O: np.ndarray) -> np.ndarray:
    n = len(O)
    pairs = list(itertools.combinations(range(n), 2))
    M = np.zeros((len(pairs), len(pairs)))
    for a, (p, r) in enumerate(pairs):
        for b, (q, s) in enumerate(pairs):
            M[a, b] = (O[p, q] * (r == s) - O[p, s] * (r == q)
                       + O[r, s] * (p == q) - O[r, q] * (p == s))
    return M


def _pair_matrix(r, n: int) -> np.ndarray:
    pairs = list(itertools.combinations(range(n), 2))
    pos = {p: k for k, p in enumerate(pairs)}
    M = np.zeros((len(pairs), len(pairs)))
    for (p, r_, q, s), v in r.gamma2.items():
        M[pos[(p, r_)], pos[(q, s)]] = v
    return M


def _casimirs(space):
    ops = {k: _one_body(space, k) for k in ("Lp", "Lm", "Lz", "Sp", "Sm", "Sz")}
    two = {k: _two_particle(v) for k, v in ops.items()}
    L2 = two["Lm"] @ two["Lp"] + two["Lz"] @ two["Lz"] + two["Lz"]
    S2 = two["Sm"] @ two["Sp"] + two["Sz"] @ two["Sz"] + two["Sz"]
    return dict(Lz=two["Lz"], Sz=two["Sz"], L2=L2, S2=S2)


def test_commutes_with_projections_and_multiplet_casimirs():
    config = Configuration(("1s", "2s", "2p"), (2, 1, 2))
    space = config.space
    ops = _casimirs(space)
    for (L, S) in [(1, 1.5), (2, 0.5)]:
        subs = decompose_configuration(config, (L, S))
        total = 0
        for sub in subs:
            for stt in sub.states:
                D = _pair_matrix(rdm_pair(stt, stt, norb=space.norb), space.norb)
                for k in ("Lz", "Sz"):
                    assert np.abs(D @ ops[k] - ops[k] @ D).max() < 1e-12
                total = total + D
        for k in ops:
            assert np.abs(total @ ops[k] - ops[k] @ total).max() < 1e-12


def test_singlet_s_state_commutes_with_casimirs():
    config = Configuration(("1s", "2s", "2p"), (0, 0, 2))
    space = config.space
    ops = _casimirs(space)
    (sub,) = decompose_configuration(config, (0, 0))
    D = _pair_matrix(rdm_pair(sub.states[0], sub.states[0], norb=space.norb), space.norb)
    for k in ops:
        assert np.abs(D @ ops[k] - ops[k] @ D).max() < 1e-12


# --- spin tracing ---------------------------------------------------------------------

def test_closed_subshell_spin_trace():
    det = 0b11_11_11  # 1s2 2s2 2p(m=1)2
    t = spin_trace(rdm_pair({det: 1.0}, {det: 1.0}, norb=10))
    npt.assert_array_equal(np.diag(t.gamma1), [2, 2, 2, 0, 0])
    assert t.trace2() == pytest.approx(15)


def test_singlet_pair_single_entry():
    t = spin_trace(rdm_pair({0b11: 1.0}, {0b11: 1.0}, norb=2))
    G = t.gamma2.tocoo()
    assert G.nnz == 1 and (G.row[0], G.col[0], G.data[0]) == (0, 0, 1.0)


def _brute_spin_traced(psi, chi, K):
    g2 = np.zeros((K * K, K * K), dtype=complex)
    for i, j, k, l in itertools.product(range(K), repeat=4):
        for a, b in itertools.product((0, 1), repeat=2):
            if 2 * i + a < 2 * k + b:
                g2[k * K + l, i * K + j] += braket(
                    chi, [("c", 2 * i + a), ("c", 2 * k + b), ("a", 2 * l + b), ("a", 2 * j + a)], psi)
    return g2


@pytest.mark.parametrize("seed", range(4))
def test_spin_trace_definition(seed):
    rng = np.random.default_rng(seed)
    K, N = 4, 3
    psi = random_state(rng, 2 * K, N, 6)
    chi = random_state(rng, 2 * K, N, 6)
    t = spin_trace(rdm_pair(psi, chi, norb=2 * K))
    npt.assert_allclose(t.gamma2.toarray(), _brute_spin_traced(psi, chi, K), atol=1e-12)
    # pair-summed partial trace is (N-1) gamma^T
    P = t.spin_summed().toarray().reshape(K, K, K, K)
    npt.assert_allclose(np.einsum("kkij->ji", P), (N - 1) * t.gamma1, atol=1e-12)


def _random_integrals(rng, K, complex_=False):
    h = rng.normal(size=(K, K))
    h = h + h.T
    v = rng.normal(size=(K,) * 4)
    # chemists' 8-fold symmetry for real orbitals
    v = v + v.transpose(1, 0, 2, 3)
    v = v + v.transpose(0, 1, 3, 2)
    v = v + v.transpose(2, 3, 0, 1)
    return h, v


def _hamiltonian_element(psi, chi, h, v, K):
    total = 0
    for i, j in itertools.product(range(K), repeat=2):
        for a in (0, 1):
            total += h[i, j] * braket(chi, [("c", 2 * i + a), ("a", 2 * j + a)], psi)
    for i, j, k, l in itertools.product(range(K), repeat=4):
        if v[i, j, k, l] == 0:
            continue
        for a, b in itertools.product((0, 1), repeat=2):
            total += 0.5 * v[i, j, k, l] * braket(
                chi, [("c", 2 * i + a), ("c", 2 * k + b), ("a", 2 * l + b), ("a", 2 * j + a)], psi)
    return total


def test_energy_contraction_matches_operator():
    rng = np.random.default_rng(21)
    K, N = 4, 3
    h, v = _random_integrals(rng, K)
    psi = random_state(rng, 2 * K, N, 8)
    chi = random_state(rng, 2 * K, N, 8)
    t = spin_trace(rdm_pair(psi, chi, norb=2 * K))
    assert t.energy(h, v) == pytest.approx(_hamiltonian_element(psi, chi, h, v, K), abs=1e-11)


# --- real basis -----------------------------------------------------------------------

def test_s_only_transform_unchanged():
    rng = np.random.default_rng(2)
    psi = random_state(rng, 6, 3, 5)
    t = spin_trace(rdm_pair(psi, psi, norb=6))
    u = transform_to_real_basis(t, basis_unitary(OrbitalSpace(("1s", "2s", "3s")).subshells))
    npt.assert_allclose(u.gamma1, t.gamma1, atol=1e-15)
    npt.assert_allclose(u.gamma2.toarray(), t.gamma2.toarray(), atol=1e-15)
    assert u.basis == "real"
    with pytest.raises(ValueError):
        transform_to_real_basis(u, np.eye(3))


def test_p0_goes_to_pz():
    space = OrbitalSpace(("1s", "2s", "2p"))
    det = 0b11 | (1 << (4 + 2))  # 1s2, 2p m=0 up
    t = spin_trace(rdm_pair({det: 1.0}, {det: 1.0}, norb=space.norb))
    u = transform_to_real_basis(t, basis_unitary(space.subshells))
    npt.assert_allclose(np.diag(u.gamma1).real, [2, 0, 1, 0, 0], atol=1e-15)
    assert u.trace1() == pytest.approx(t.trace1())
    assert u.trace2() == pytest.approx(t.trace2())


def _rotate_states(states, U, norb):
    """Rewrite determinant states in a rotated spatial basis (full expansion)."""
    K = norb // 2
    # single-particle map: a^+_{Y_m, s} = sum_a conj(U[a, m]) a^+_{Z_a, s}
    out = []
    for stt in states:
        new = {}
        for det, c in stt.items():
            occ = [p for p in range(norb) if det >> p & 1]
            terms = {0: c}
            for p in reversed(occ):
                m, s = divmod(p, 2)
                nxt = {}
                for d, v in terms.items():
                    for a in range(K):
                        w = np.conj(U[a, m])
                        if abs(w) < 1e-15:
                            continue
                        r = create(d, 2 * a + s)
                        if r is not None:
                            nxt[r[0]] = nxt.get(r[0], 0) + r[1] * w * v
                terms = nxt
            for d, v in terms.items():
                new[d] = new.get(d, 0) + v
        out.append(new)
    return out


def test_transform_matches_rotated_states():
    space = OrbitalSpace(("1s", "2s", "2p"))
    U = basis_unitary(space.subshells)
    rng = np.random.default_rng(8)
    psi = random_state(rng, space.norb, 3, 6)
    chi = random_state(rng, space.norb, 3, 6)
    t = transform_to_real_basis(spin_trace(rdm_pair(psi, chi, norb=space.norb)), U)
    zpsi, zchi = _rotate_states([psi, chi], U, space.norb)
    K = space.nspatial
    npt.assert_allclose(t.gamma2.toarray(), _brute_spin_traced(zpsi, zchi, K), atol=1e-12)
    g1 = np.zeros((K, K), dtype=complex)
    for i, j in itertools.product(range(K), repeat=2):
        for a in (0, 1):
            g1[i, j] += braket(zchi, [("c", 2 * j + a), ("a", 2 * i + a)], zpsi)
    npt.assert_allclose(t.gamma1, g1, atol=1e-12)


def test_energy_invariant_under_real_transform():
    space = OrbitalSpace(("1s", "2s", "2p"))
    U = basis_unitary(space.subshells)
    K = space.nspatial
    rng = np.random.default_rng(4)
    hz, vz = _random_integrals(rng, K)
    hy = U.T @ hz @ U.conj()
    vy = np.einsum("ai,bj,ck,dl,abcd->ijkl", U, U.conj(), U, U.conj(), vz)
    psi = random_state(rng, space.norb, 4, 10)
    chi = random_state(rng, space.norb, 4, 10)
    t = spin_trace(rdm_pair(psi, chi, norb=space.norb))
    u = transform_to_real_basis(t, U)
    assert u.energy(hz, vz) == pytest.approx(t.energy(hy, vy), abs=1e-11)
    assert t.energy(hy, vy) == pytest.approx(_hamiltonian_element(psi, chi, hy, vy, K), abs=1e-11)
