"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the terminal
summary, then asserts.
"""

import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from atomci import cli, data
from atomci.angular import single_particle_matrices
from atomci.coulomb import CoulombPlan, coulomb_integral
from atomci.fock import FullSpace, apply_excitation, exact_partition_cost, index_determinants
from atomci.lsdecomp import decompose_subshell, target_subspace, term_dimension
from atomci.model import ModelSpec, Subshell, ordered_subshells
from atomci.rdm import rdm_pair, spin_trace
from atomci.solver import Problem, energy_objective, evaluate, optimize_exponents, virial_check
from atomci.sto import STOBasis, one_body_matrix, radial_one_body

from conftest import ACCEPTANCE
from oracles import coulomb_oracle, one_body_oracle
from reference_terms import TABLE, reference_state

HALF = Fraction(1, 2)


def record(n, title, ok, detail):
    ACCEPTANCE[n] = (bool(ok), title, detail)
    assert ok, detail


def extended(el, k):
    return cli.RunConfig.from_dict({"element": el, "model": "extended", "constraints": {"4s": k}})


# --- shared runs ---------------------------------------------------------------

@pytest.fixture(scope="module")
def table2():
    out = {}
    for el in data.SYMBOLS:
        t0 = time.perf_counter()
        rep = cli.run(cli.RunConfig.from_dict({"element": el, "model": "minimal"}))
        out[el] = (rep, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def table3():
    out = {}
    for el, rows in data.EXTENDED.items():
        for row in rows:
            cfg = extended(el, row.s_occupation)
            spec = cli.resolve_spec(cfg)
            problem, _ = cli.load_or_build(spec)
            z = data.preset(f"{el}-4s{row.s_occupation}")
            at_published = energy_objective(problem, {k: v for k, v in z.items()
                                                      if k in {s.label for s in problem.used}})
            t0 = time.perf_counter()
            res = optimize_exponents(problem, z)
            out[el, row.s_occupation] = dict(row=row, term=cli.term_symbol(*spec.target), dim=problem.dim,
                                             published_point=at_published, result=res,
                                             seconds=time.perf_counter() - t0, problem=problem)
    return out


# --- 1 -------------------------------------------------------------------------

def _vector(state, keys):
    return np.array([float(state.get(k, 0)) for k in keys])


def test_criterion_1_term_tables():
    t0 = time.perf_counter()
    rows = {}
    for l, n, term, terms, norm in TABLE:
        rows.setdefault((l, n), []).append((term, reference_state(l, terms, norm)))
    problems = []
    for (l, n), ref in rows.items():
        blocks = decompose_subshell(l, n)
        if Counter(b.term for b in blocks) != Counter(t for t, _ in ref):
            problems.append(f"terms of l={l} n={n}")
            continue
        if sum(b.dim for b in blocks) != math.comb(2 * (2 * l + 1), n):
            problems.append(f"dimension of l={l} n={n}")
        for term in set(t for t, _ in ref):
            mine = [{k[0]: v for k, v in b.highest_weight().items()} for b in blocks if b.term == term]
            theirs = [s for t, s in ref if t == term]
            if len(mine) == 1:
                a, b = mine[0], theirs[0]
                if a != b and a != {k: -v for k, v in b.items()}:
                    problems.append(f"{term} of l={l} n={n}")
            else:
                keys = sorted(set().union(*mine, *theirs))
                P = sum(np.outer(v, v) for v in (_vector(s, keys) for s in mine))
                Q = sum(np.outer(v, v) for v in (_vector(s, keys) for s in theirs))
                if np.abs(P - Q).max() > 1e-12:
                    problems.append(f"{term} projector of l={l} n={n}")
    dt = time.perf_counter() - t0
    powers = {(0, n) for n in (1, 2)} | {(1, n) for n in range(1, 7)} | {(2, n) for n in (1, 2, 3)}
    ok = not problems and dt < 10 and set(rows) == powers
    record(1, "term tables", ok,
           f"{len(rows)} subshell powers, {len(TABLE)} states, {dt:.2f}s, mismatches {problems or 'none'}")


# --- 2 -------------------------------------------------------------------------

def test_criterion_2_dimension_counts():
    spec = ModelSpec(24, 24, "3p", "4d", {"4s": 1}, target=(0, 3, 1))
    got = (len(index_determinants(FullSpace(28, 6))), len(index_determinants(FullSpace(26, 5))),
           term_dimension(spec), target_subspace(spec).dim)
    want = (376740, 65780, 98, 14)
    record(2, "dimension counts", got == want, f"got {got}, want {want}")


# --- 3 -------------------------------------------------------------------------

def test_criterion_3_cost_ratio():
    got = exact_partition_cost((6, 10, 2), 12, 3)
    want = Fraction(50774322144, 938076521)
    record(3, "exact cost ratio", got == want and isinstance(got, Fraction), f"{got} (~{float(got):.2f})")


# --- 4 -------------------------------------------------------------------------

def test_criterion_4_integral_oracles():
    t0 = time.perf_counter()
    subs = ordered_subshells(Subshell(4, 2))
    rng = np.random.default_rng(2024)
    Z = 24.0
    z = np.sort(rng.uniform(1.0, 24.0, len(subs)))[::-1]
    b = STOBasis(subs, z)
    assert b.nspatial == 23
    one_err = 0.0
    for sa in subs:
        for sb in subs:
            if sa.l == sb.l and sa <= sb:
                ref = one_body_oracle(b, sa, sb, Z)
                scale = max(abs(ref), 1e-3 * abs(radial_one_body(b, sa, sa, Z)))
                one_err = max(one_err, abs(radial_one_body(b, sa, sb, Z) - ref) / scale)
    plan = CoulombPlan(b)
    vals = plan.evaluate(b)
    nonzero = np.flatnonzero(np.abs(vals) > 1e-12 * np.abs(vals).max())
    pick = rng.choice(nonzero, 110, replace=False)
    two_err = max(abs(vals[k] - coulomb_oracle(b, *plan.quadruples[k])) / abs(vals[k]) for k in pick)
    zeta_err = max(abs(coulomb_integral(STOBasis(["1s"], [zeta]), 0, 0, 0, 0) - 5 * zeta / 8) / (5 * zeta / 8)
                   for zeta in (0.3, 1.0, 2.7, 24.0))
    dt = time.perf_counter() - t0
    ok = one_err < 1e-8 and two_err < 1e-8 and zeta_err < 1e-10 and dt < 120
    record(4, "integral oracles", ok,
           f"one-body rel err {one_err:.1e}, two-body rel err {two_err:.1e} over {len(pick)} quadruples, "
           f"(1s1s|1s1s) rel err {zeta_err:.1e}, {dt:.1f}s")


# --- 5 -------------------------------------------------------------------------

def test_criterion_5_hydrogenic_limits():
    lines, ok = [], True
    for Z in (1, 4, 26):
        p = Problem(ModelSpec(1, Z, None, "1s", target=(0, HALF, 1)))
        r = optimize_exponents(p, {"1s": 0.6 * Z}, fatol=1e-13)
        good = abs(r.exponents["1s"] - Z) < 1e-3 * Z and abs(r.energy + Z * Z / 2) < 1e-8
        e_exact = p.energy({"1s": Z})
        good &= abs(e_exact + Z * Z / 2) < 1e-8 * max(1, Z * Z)
        ok &= good
        lines.append(f"N=1 Z={Z}: zeta {r.exponents['1s']:.6f}, E err {r.energy + Z * Z / 2:.1e}")
    for Z in (2, 10):
        p = Problem(ModelSpec(2, Z, None, "1s", target=(0, 0, 1)))
        r = optimize_exponents(p, {"1s": float(Z)}, fatol=1e-14)
        zeta = r.exponents["1s"]
        ok &= abs(zeta - (Z - 5 / 16)) < 1e-6 * Z
        lines.append(f"He-like Z={Z}: zeta-(Z-5/16) {zeta - (Z - 5 / 16):.1e}")
    record(5, "hydrogenic limits", ok, "; ".join(lines))


# --- 6 -------------------------------------------------------------------------

def test_criterion_6_minimal_model_table(table2):
    bad, worst, slowest = [], 0.0, 0.0
    dims = []
    for el, (rep, dt) in table2.items():
        row = data.MINIMAL[el]
        dims.append(rep.dim)
        err = rep.energy - row.energy
        worst = max(worst, abs(err))
        slowest = max(slowest, dt)
        if abs(err) > 5e-4 or rep.term != row.term or rep.dim != row.dim:
            bad.append(f"{el} {rep.term} dim {rep.dim} E {rep.energy:.5f} vs {row.energy}")
    ok = not bad and dims == [1, 2, 4, 5, 4, 3, 1, 1, 2, 1, 1, 1]
    record(6, "minimal-model table", ok,
           f"max |dE| {worst:.1e} Ha, dims {dims}, slowest {slowest:.0f}s, mismatches {bad or 'none'}")


# --- 7 -------------------------------------------------------------------------

def test_criterion_7_extended_model_table(table3):
    notes, ok = [], True
    for (el, k), r in table3.items():
        row = r["row"]
        d_pub = r["published_point"] - row.energy
        d_opt = r["result"].energy - row.energy
        good = (abs(d_pub) <= 2e-2 and d_opt <= 1e-3 and r["term"] == row.term and r["dim"] == row.dim)
        ok &= good
        if not good:
            notes.append(f"{el} 4s{k} {r['term']} dim {r['dim']}: dE(published Z) {d_pub:+.1e}, dE(opt) {d_opt:+.1e}")
    order_bad = []
    for el in data.EXTENDED:
        e1, e2 = table3[el, 1]["result"].energy, table3[el, 2]["result"].energy
        want_s1 = el == "Cr"
        if (e1 < e2) != want_s1:
            order_bad.append(f"{el}: E(4s1)={e1:.5f}, E(4s2)={e2:.5f}")
    ok &= not order_bad
    worst_pub = max(abs(r["published_point"] - r["row"].energy) for r in table3.values())
    record(7, "extended-model table", ok,
           f"max |dE| at published exponents {worst_pub:.1e} Ha; row issues {notes or 'none'}; "
           f"ordering issues {order_bad or 'none'}")


# --- 8 -------------------------------------------------------------------------

def test_criterion_8_cr_weights():
    cfg = extended("Cr", 1)
    problem, _ = cli.load_or_build(cli.resolve_spec(cfg))
    z = data.preset("Cr-4s1")
    res = evaluate(problem, {k: v for k, v in z.items() if k in {s.label for s in problem.used}})
    got = {}
    for lab, c in zip(res.labels, res.eigenvector):
        key = " ".join(t for t in lab.split() if t != "4s1") or "(none)"
        got[key] = got.get(key, 0.0) + c * c
    diffs = {}
    for key, amps in data.CR_AMPLITUDES.items():
        want = math.sqrt(sum(a * a for a in amps))
        diffs[key] = math.sqrt(got.get(key, 0.0)) - want
    extra = set(got) - set(data.CR_AMPLITUDES)
    largest = max(got, key=got.get)
    worst = max(diffs, key=lambda k: abs(diffs[k]))
    ok = abs(diffs[worst]) <= 0.02 and largest == "3d4 4d1" and not extra
    record(8, "Cr 7S weight structure", ok,
           f"largest {largest} ({math.sqrt(got[largest]):.3f}), worst {worst} off by {diffs[worst]:+.3f}")


# --- 9 -------------------------------------------------------------------------

def _apply(op, state):
    out = {}
    rows, cols = np.nonzero(op)
    for det, c in state.items():
        for i, j in zip(rows, cols):
            r = apply_excitation(det, i, j)
            if r is not None:
                out[r[0]] = out.get(r[0], 0.0) + r[1] * op[i, j] * c
    return out


def _combine(*terms):
    out = {}
    for a, s in terms:
        for d, c in s.items():
            out[d] = out.get(d, 0.0) + a * c
    return out


def _norm(s):
    return math.sqrt(sum(c * c for c in s.values()))


def test_criterion_9_property_suites(table2, table3):
    spec = ModelSpec(24, 24, "3p", "4d", {"4s": 1}, target=(0, 3, 1))
    sub = target_subspace(spec)
    space = spec.space
    ops = {}
    for name in ("Lp", "Lz", "Sp", "Sz"):
        M = np.zeros((space.norb, space.norb))
        for s, off in zip(space.subshells, space.offsets):
            m = single_particle_matrices(s.l)[name]
            M[off:off + len(m), off:off + len(m)] = [[float(x) for x in row] for row in m]
        ops[name] = M
    L, S, ML, MS, _ = sub.labels
    comm = 0.0
    for st in sub.states:
        psi = st.float_coeffs()
        lz, sz = _apply(ops["Lz"], psi), _apply(ops["Sz"], psi)
        lp, sp = _apply(ops["Lp"], psi), _apply(ops["Sp"], psi)
        L2 = _combine((1, _apply(ops["Lp"].T, lp)), (1, _apply(ops["Lz"], lz)), (1, lz), (-L * (L + 1), psi))
        S2 = _combine((1, _apply(ops["Sp"].T, sp)), (1, _apply(ops["Sz"], sz)), (1, sz), (-float(S * (S + 1)), psi))
        for r in (L2, S2, _combine((1, lz), (-ML, psi)), _combine((1, sz), (-float(MS), psi))):
            comm = max(comm, _norm(r))

    trace = 0.0
    for st in sub.states[:4]:
        t = spin_trace(rdm_pair(st, st))
        trace = max(trace, abs(t.trace1() - 24), abs(t.trace2() - 24 * 23 / 2))

    herm = 0.0
    for r in table3.values():
        for H in r["problem"].matrices(r["result"].exponents).values():
            herm = max(herm, np.abs(H - H.T).max(), float(np.iscomplexobj(H)))

    virials = [abs(rep.virial - 1) for rep, _ in table2.values()]
    virials += [abs(virial_check(r["result"]) - 1) for r in table3.values()]

    cr = STOBasis(ordered_subshells(Subshell(4, 2)), [23.68, 21.44, 20.18, 15.64, 13.89, 12.37, 5.67, 9.51, 10.0])
    plan = CoulombPlan(cr)
    base = plan.evaluate(cr)
    # relative to the tensor scale; entries far below it are cancellation-limited
    # in double precision, so per-entry relative error is held only above 1e-6 of it
    homog = entry = tiny = 0.0
    vmax = np.abs(base).max()
    for t in (0.5, 2.0):
        scaled = plan.evaluate(STOBasis(cr.subshells, [t * z for z in cr.exponents]))
        homog = max(homog, np.abs(scaled - t * base).max() / (t * vmax))
        big = np.abs(base) >= 1e-6 * vmax
        entry = max(entry, np.abs(scaled[big] / (t * base[big]) - 1).max())
        nz = np.abs(base) > 0
        tiny = max(tiny, np.abs(scaled[nz] / (t * base[nz]) - 1).max())

    ok = comm < 1e-12 and trace < 1e-10 and herm < 1e-10 and max(virials) < 1e-3 and homog < 1e-10 and entry < 1e-10
    record(9, "property suites", ok,
           f"commutation residual {comm:.1e}, RDM trace err {trace:.1e}, H asymmetry {herm:.1e}, "
           f"max |virial-1| {max(virials):.1e}, scaling err {homog:.1e} of tensor scale "
           f"({entry:.1e} per entry above 1e-6 of it, {tiny:.1e} over all nonzero entries)")
