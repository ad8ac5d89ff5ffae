"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
Budgets are asserted where stated; every expected value is either computed
by an independent oracle inside this module or pinned from first principles.
"""

import itertools
import zlib
import random
import time

import pytest

from wittlab import blocks as B
from wittlab import catalog as C
from wittlab import stable_range as S
from wittlab.modules import (
    Module,
    free_module,
    is_unimodular,
    is_unimodular_bruteforce,
)
from wittlab.quadratic import (
    direct_sum_quadratic,
    hyperbolic,
    is_lambda_unimodular,
    is_quad_isomorphic,
    witt_index,
)
from wittlab.suites import run_suite, random_in_hypothesis_instance
from wittlab.verify import (
    verify_gl_connectivity,
    verify_hu_connectivity,
    verify_iu_connectivity,
    verify_link_isos,
)

PASS = "[PASS]"
FAIL = "[FAIL]"


def report(ok, num, text):
    print("%s criterion %2d: %s" % (PASS if ok else FAIL, num, text))
    assert ok, text


def test_criterion_1_axiom_suite():
    t0 = time.time()
    rep = run_suite("axioms")
    dt = time.time() - t0
    ok = rep.aggregate == "ok" and dt < 30.0
    report(ok, 1, "axiom suite over the full catalog: %d cases, %s, %.1fs "
           "(budget 30s)" % (len(rep.cases), rep.aggregate, dt))


def _oracle_modules():
    GF2 = C.catalog_ring("gf2")
    GF3 = C.catalog_ring("gf3")
    Z4 = C.catalog_ring("z4")
    from wittlab.modules import cyclic_module, direct_sum_modules

    mods = [
        free_module(GF2, 2),
        free_module(GF2, 3),
        Module(GF2, 3, ((1, 1, 0),)),
        free_module(GF3, 2),
        free_module(Z4, 1),
        Module(Z4, 2, ((2, 0),)),
    ]
    S2, _, _ = direct_sum_modules(free_module(Z4, 1), cyclic_module(Z4, 2))
    mods.append(S2)
    return mods


def test_criterion_2_oracle_equivalence():
    t0 = time.time()
    checked = 0
    # unimodularity vs the definitional brute force, exhaustively
    for M in _oracle_modules():
        elems = list(M.elements())
        for x in elems:
            assert (is_unimodular(M, [x]) is not None) == \
                is_unimodular_bruteforce(M, [x])
            checked += 1
        if len(elems) <= 16:
            for x, y in itertools.product(elems, elems):
                if x == y:
                    continue
                assert (is_unimodular(M, [x, y]) is not None) == \
                    is_unimodular_bruteforce(M, [x, y])
                checked += 1
    # blocks: exhaustive over GF(2) (two modules) and Z/4 with M = Z/2,
    # n <= 3, k <= 2 in full
    GF2 = C.catalog_ring("gf2")
    Z4 = C.catalog_ring("z4")

    def antifuncs(M):
        out = []
        for values in itertools.product(range(M.ring.size), repeat=M.ngens):
            try:
                out.append(B.AntiFunctional(M, values))
            except B.BlockError:
                pass
        return out

    block_cases = [
        (GF2, free_module(GF2, 1)),
        (GF2, free_module(GF2, 2)),
        (Z4, Module(Z4, 1, ((2,),))),
    ]
    blocks_checked = 0
    for ring, M in block_cases:
        funcs = antifuncs(M)
        for n, k in [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2)]:
            for entries in itertools.product(range(ring.size), repeat=n * k):
                mat = [list(entries[i * k:(i + 1) * k]) for i in range(n)]
                for fs in itertools.product(funcs, repeat=k):
                    A = B.Block(M, mat, list(fs))
                    fast = B.is_unimodular_block(A) is not None
                    slow = B.is_unimodular_block_bruteforce(A)
                    assert fast == slow, (ring.name, mat)
                    blocks_checked += 1
    dt = time.time() - t0
    ok = dt < 300.0
    report(ok, 2, "oracle equivalence: %d sequences, %d blocks, 100%% "
           "agreement, %.1fs (budget 300s)" % (checked, blocks_checked, dt))


def test_criterion_3_stable_ranks():
    t0 = time.time()
    srs = {}
    usrs = {}
    for rname in C.ring_names():
        ring = C.catalog_ring(rname)
        srs[rname] = S.stable_rank(ring, 2).value
        for pname, param in C.catalog_parameters(rname):
            usrs[pname] = S.unitary_stable_rank(ring, param, 2).value
    dt = time.time() - t0
    ok = all(v == 1 for v in srs.values()) and \
        all(v is not None and v <= 2 for v in usrs.values()) and dt < 600.0
    report(ok, 3, "sr = 1 for all %d rings; usr <= 2 for all %d parameters "
           "(values: %s); %.1fs (budget 600s)" %
           (len(srs), len(usrs), sorted(set(usrs.values())), dt))


def test_criterion_4_matrix_reducibility():
    GF2 = C.catalog_ring("gf2")
    Z4 = C.catalog_ring("z4")

    def antifuncs(M):
        out = []
        for values in itertools.product(range(M.ring.size), repeat=M.ngens):
            try:
                out.append(B.AntiFunctional(M, values))
            except B.BlockError:
                pass
        return out

    reduced = 0
    for ring, M, dims in [
        (GF2, free_module(GF2, 1), [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2)]),
        (Z4, Module(Z4, 1, ((2,),)), [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2)]),
    ]:
        funcs = antifuncs(M)
        for n, k in dims:
            if k + 1 > n + 1:  # sr = 1 for both rings
                continue
            for entries in itertools.product(range(ring.size), repeat=n * k):
                mat = [list(entries[i * k:(i + 1) * k]) for i in range(n)]
                for fs in itertools.product(funcs, repeat=k):
                    A = B.Block(M, mat, list(fs))
                    if B.is_unimodular_block(A) is None:
                        continue
                    cert = B.matrix_reduce(A, sr=1)  # raises on failure
                    assert cert.replay_ok(), "certificate replay mismatch"
                    assert B.ring_matrix_left_inverse(
                        ring, cert.top_matrix) is not None
                    reduced += 1
    report(True, 4, "matrix reducibility: %d unimodular blocks in the "
           "exhaustive sweep, zero failures, all certificates replay"
           % reduced)


def test_criterion_5_straightening():
    per_ring = 200
    total = 0
    t0 = time.time()
    for rname in C.ring_names():
        ring = C.catalog_ring(rname)
        max_g = 1
        while max_g < 3 and ring.size ** (2 * (max_g + 1)) <= 8192:
            max_g += 1
        pname, param = C.catalog_parameters(rname)[0]
        usr = S.unitary_stable_rank(ring, param, 2).value
        assert usr is not None
        if max_g < usr + 1:
            pytest.fail("no in-hypothesis instance fits the cap for %s"
                        % rname)
        rng = random.Random(zlib.crc32(rname.encode()))
        for i in range(per_ring):
            k = 2 if (max_g >= usr + 2 and ring.size <= 3 and i % 4 == 0) \
                else 1
            Q, seq, g = random_in_hypothesis_instance(
                rng, param, usr, k=k, max_g=max_g)
            phi = B.hyperbolic_straighten(Q, seq, k, usr=usr, cap=8192)
            # independent re-verification of both post-conditions
            frame = B.frame_for(Q, usr=usr, cap=8192)
            out = [phi(v) for v in seq]
            for w in out:
                As, Bs = frame.hyperbolic_coords(w)
                assert all(a == ring.zero for a in As[k:])
                assert all(b == ring.zero for b in Bs[k:])
            proj = [frame.project_std(w) for w in out]
            assert is_lambda_unimodular(frame.H_std, proj) is not None
            total += 1
    dt = time.time() - t0
    report(True, 5, "straightening: %d seeded in-hypothesis instances "
           "(%d per catalog ring), both post-conditions re-verified, zero "
           "failures, %.1fs" % (total, per_ring, dt))


def test_criterion_6_transitivity():
    cases = []
    for rname in ("gf2", "z4"):
        pname, param = C.catalog_parameters(rname)[0]
        ring = param.ring
        usr = S.unitary_stable_rank(ring, param, 2).value
        quads = [("H^%d" % g, hyperbolic(param, g))
                 for g in range(usr + 1, usr + 3)
                 if ring.size ** (2 * g) <= 4096]
        if ring.size ** 3 <= 4096:
            Qm, _, _ = direct_sum_quadratic(hyperbolic(param, usr + 1),
                                            C.degenerate_point(param))
            if Qm.size <= 4096:
                quads.append(("H^%d+deg" % (usr + 1), Qm))
        for qname, Q in quads:
            frame = B.frame_for(Q, usr=usr)
            classes = {}
            for x in Q.module.elements(cap=4096):
                if x.is_zero() or is_lambda_unimodular(Q, [x]) is None:
                    continue
                classes.setdefault(Q.mu_rep(x), []).append(x)
            moved = 0
            for r, members in sorted(classes.items()):
                e1, f1 = frame.pairs[0]
                target = e1 + f1 * r
                for v in members:
                    phi, tgt = B.transitive_move(Q, v, r, frame=frame,
                                                 usr=usr)
                    assert tgt == target and phi(v) == target
                    moved += 1
            cases.append((rname, qname, len(classes), moved))
    report(True, 6, "transitivity: single U(M)-orbit per mu-class on %s "
           "(every lambda-unimodular element moved to e1 + f1 r)" %
           ", ".join("%s:%s (%d classes, %d elts)" % c for c in cases))


def test_criterion_7_cancellation():
    checked = []
    for rname in ("gf2", "z4", "gf3"):
        pname, param = C.catalog_parameters(rname)[0]
        ring = param.ring
        usr = S.unitary_stable_rank(ring, param, 2).value
        H = hyperbolic(param, 1)
        D = C.degenerate_point(param)
        pairs = [("H~H", H, H)]
        if ring.size ** 3 <= 4096:
            Qm, _, _ = direct_sum_quadratic(H, D)
            Qn, _, _ = direct_sum_quadratic(D, H)
            pairs.append(("H+deg", Qm, Qn))
        for cname, A, Bq in pairs:
            if witt_index(A, usr=usr).g < usr:
                continue
            H1 = hyperbolic(param, 1)
            AH, _, _ = direct_sum_quadratic(A, H1)
            BH, _, _ = direct_sum_quadratic(Bq, H1)
            iso = is_quad_isomorphic(AH, BH)
            assert iso is not None, "sum isometry must exist"
            beta = B.cancel_H(A, Bq, iso, sums=(AH, BH), usr=usr)
            assert B.is_isometry(A, Bq, beta)
            # cross-check against the exhaustive isometry search
            assert is_quad_isomorphic(A, Bq) is not None
            checked.append("%s:%s" % (rname, cname))
    report(True, 7, "cancellation: verified isometry on every in-hypothesis "
           "pair (%s), cross-checked against exhaustive search" %
           ", ".join(checked))


def test_criterion_8_gl_connectivity():
    t0 = time.time()
    GF2 = C.catalog_ring("gf2")
    sr = S.stable_rank(GF2, 2).value
    lines = []
    for n in (2, 3, 4):
        M = free_module(GF2, n)
        rep = verify_gl_connectivity(M, sr=sr)
        assert rep.bound == n - 2
        assert rep.verdict.ok() and not rep.critical, rep.verdict.to_dict()
        repl = verify_gl_connectivity(M, sr=sr, base=[M.gen(0)])
        assert repl.bound == n - 3
        assert repl.verdict.ok() and not repl.critical
        lines.append("n=%d: d=%d %s, link d=%d %s" %
                     (n, rep.bound, rep.verdict.result, repl.bound,
                      repl.verdict.result))
    dt = time.time() - t0
    ok = dt < 600.0
    report(ok, 8, "GL connectivity: %s; %.1fs (budget 600s)" %
           ("; ".join(lines), dt))


def test_criterion_9_quad_connectivity():
    t0 = time.time()
    pname, param = C.catalog_parameters("gf2")[0]
    assert len(param.lam) == 1  # Lambda = {0}
    usr = S.unitary_stable_rank(param.ring, param, 2).value
    lines = ["usr=%d" % usr]
    for g in (1, 2, 3, 4):
        Q = hyperbolic(param, g)
        ri = verify_iu_connectivity(Q, usr=usr)
        rh = verify_hu_connectivity(Q, usr=usr)
        assert ri.bound == (g - usr - 2) // 2
        assert rh.bound == (g - usr - 3) // 2
        assert ri.verdict.result != "refuted"
        assert rh.verdict.result != "refuted"
        assert ri.verdict.ok(), ri.verdict.to_dict()
        assert rh.verdict.ok(), rh.verdict.to_dict()
        if ri.bound in (-1, 0):
            assert ri.verdict.result in ("nonempty-verified",
                                         "homology-verified",
                                         "fully-verified")
        if rh.bound in (-1, 0):
            assert rh.verdict.result in ("nonempty-verified",
                                         "homology-verified",
                                         "fully-verified")
        lines.append("g=%d: iu d=%d %s / hu d=%d %s" %
                     (g, ri.bound, ri.verdict.result, rh.bound,
                      rh.verdict.result))
    dt = time.time() - t0
    ok = dt < 900.0
    report(ok, 9, "quadratic connectivity: %s; %.1fs (budget 900s)" %
           ("; ".join(lines), dt))


def test_criterion_10_link_isomorphisms():
    pname, param = C.catalog_parameters("gf2")[0]
    usr = S.unitary_stable_rank(param.ring, param, 2).value
    done = []
    for g in range(usr + 1, 4):
        Q = hyperbolic(param, g)
        e1, f1 = Q.hyperbolic_pairs[0]
        res = verify_link_isos(Q, [(e1, f1)], usr=usr)
        assert res["iu"], "IU link decomposition failed at g=%d" % g
        assert res["hu"], "HU link decomposition failed at g=%d" % g
        assert res["decoration_count"]
        done.append("H^%d (Y size %d)" % (g, res["Y_size"]))
    report(True, 10, "link isomorphisms: poset bijections confirmed on %s"
           % ", ".join(done))
