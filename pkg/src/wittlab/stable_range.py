"""Stable rank sr(R), transitivity (T_n), and unitary stable rank usr(R).

(S_n) sweeps enumerate all unimodular rows of R^(n+1) and search shortening
vectors; (T_n) partitions the unimodular vectors of H^n by their mu-class
and runs orbit BFS under the elementary unitary generators.  Everything is
budgeted; RangeReports carry the verdict plus a witness or certificate.
"""

import itertools

from wittlab.linalg import LinearSolver
from wittlab.quadratic import hyperbolic, transvection, unitary_group

DEFAULT_BUDGET = 1 << 22


class BudgetExceeded(RuntimeError):
    pass


class RangeReport:
    """Outcome of one (S_n) / (T_n) / (US_n) check."""

    def __init__(self, ring, prop, n, verdict, witness=None, stats=None,
                 mode=None):
        self.ring = ring
        self.prop = prop
        self.n = n
        self.verdict = verdict  # "holds" | "fails" | "budget"
        self.witness = witness
        self.stats = stats or {}
        self.mode = mode
        if verdict == "holds":
            assert witness is None
        if verdict == "fails":
            assert witness is not None

    def to_dict(self):
        return {
            "ring": self.ring.name,
            "property": self.prop,
            "n": self.n,
            "verdict": self.verdict,
            "witness": self.witness,
            "stats": self.stats,
            "mode": self.mode,
        }

    def __repr__(self):
        return "RangeReport(%s, %s_%d: %s)" % (
            self.ring.name, self.prop, self.n, self.verdict)


def row_unimodular(ring, row):
    """Is a row of R^k left-unimodular (some c with sum c_i r_i = 1)?"""
    d, m = ring.base_dim, ring.base_mod
    rows = []
    for r in row:
        for t in ring.basis:
            rows.append([int(v) for v in ring.to_base[ring.mul[t, r]]])
    solver = LinearSolver(rows, m, width=d)
    return solver.solve([int(v) for v in ring.to_base[ring.one]]) is not None


def check_Sn(ring, n, budget=DEFAULT_BUDGET):
    """(S_n): every unimodular row of R^(n+1) shortens to R^n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    size = ring.size ** (n + 1)
    if size > budget:
        raise BudgetExceeded("(S_%d) sweep needs %d rows" % (n, size))
    uni_short = {}

    def short_unimodular(row):
        if row not in uni_short:
            uni_short[row] = row_unimodular(ring, row)
        return uni_short[row]

    visits = 0
    checked = 0
    for row in itertools.product(range(ring.size), repeat=n + 1):
        if not row_unimodular(ring, row):
            continue
        checked += 1
        last = row[n]
        found = False
        for t in itertools.product(range(ring.size), repeat=n):
            visits += 1
            if visits > budget:
                raise BudgetExceeded("(S_%d) shortening search" % n)
            shortened = tuple(
                int(ring.add[row[i], ring.mul[t[i], last]]) for i in range(n))
            if short_unimodular(shortened):
                found = True
                break
        if not found:
            return RangeReport(ring, "S", n, "fails", witness=list(row),
                               stats={"checked": checked, "visits": visits})
    return RangeReport(ring, "S", n, "holds",
                       stats={"checked": checked, "visits": visits})


class StableRankResult:
    def __init__(self, value, reports):
        self.value = value  # int or None (> n_max)
        self.reports = reports

    def __repr__(self):
        return "sr=%s" % (self.value if self.value is not None else ">max")


def stable_rank(ring, n_max, budget=DEFAULT_BUDGET):
    """Least n <= n_max with (S_n), walking upward."""
    reports = []
    for n in range(1, n_max + 1):
        rep = check_Sn(ring, n, budget=budget)
        reports.append(rep)
        if rep.verdict == "holds":
            return StableRankResult(n, reports)
    return StableRankResult(None, reports)


# -- elementary unitary generators and (T_n) ---------------------------------


def elementary_unitary_generators(ring, param, n, u_mode="all", H=None):
    """Transvections tau(b, u, x): b a standard basis vector of H^n, u over
    vectors supported off the dual coordinate of b with lambda(b, u) = 0,
    x over representatives of mu(u).

    u_mode "all" emits the full family; "basis" restricts u to the zero
    vector and single-coordinate vectors (the subgroup generated is the
    same by the Eichler composition law, which check_Tn does not assume:
    it only uses the reduced family for sound "holds" verdicts).
    """
    if H is None:
        H = hyperbolic(param, n)
    module = H.module
    gens = []
    lam = param.lam
    for bi in range(2 * n):
        b = module.gen(bi)
        dual = bi + 1 if bi % 2 == 0 else bi - 1
        support = [i for i in range(2 * n) if i != dual]
        if u_mode == "all":
            u_blocks = (
                dict(zip(support, coeffs))
                for coeffs in itertools.product(range(ring.size),
                                                repeat=len(support))
            )
        elif u_mode == "basis":
            singles = [{}]
            singles += [{i: c} for i in support for c in range(1, ring.size)]
            u_blocks = iter(singles)
        else:
            raise ValueError("unknown u_mode %r" % u_mode)
        for placed in u_blocks:
            blocks = [ring.zero] * (2 * n)
            for i, c in placed.items():
                blocks[i] = c
            u = module.element(blocks)
            mu_rep = H.mu_rep(u)
            for l in lam:
                x = int(ring.add[mu_rep, l])
                t = transvection(H, b, u, x)
                gens.append(t)
    # dedupe by action
    seen = set()
    out = []
    for t in gens:
        k = t.key()
        if k not in seen:
            seen.add(k)
            out.append(t)
    return H, out


def _mu_class_partition(H, budget):
    ring = H.ring
    module = H.module
    if module.size > budget:
        raise BudgetExceeded("H^n too large to enumerate")
    classes = {}
    for x in module.elements(cap=module.size):
        if x.is_zero():
            continue
        if not row_unimodular(ring, x.ring_blocks()):
            continue
        classes.setdefault(H.mu_rep(x), []).append(x)
    return classes


def _gen_permutations(H, gens):
    """Each generator as a permutation of the (free) module's element list."""
    import numpy as np

    module = H.module
    m = module.ring.base_mod
    elems = list(module.elements(cap=module.size))
    index = {x.vec: i for i, x in enumerate(elems)}
    E = np.array([x.vec for x in elems], dtype=np.int64)
    perms = []
    for t in gens:
        B = np.array(t.f.B, dtype=np.int64)
        imgs = (E @ B.T) % m
        if module.relators:
            perm = np.array([index[module.canon(list(row))] for row in imgs],
                            dtype=np.int64)
        else:
            perm = np.array([index[tuple(int(v) for v in row)] for row in imgs],
                            dtype=np.int64)
        perms.append(perm)
    return elems, index, perms


def _orbit_of(seed_idx, perms, budget, visits_box):
    frontier = [seed_idx]
    seen = {seed_idx}
    while frontier:
        nxt = []
        for i in frontier:
            for perm in perms:
                visits_box[0] += 1
                if visits_box[0] > budget:
                    raise BudgetExceeded("orbit BFS budget")
                j = int(perm[i])
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return seen


def check_Tn(ring, param, n, budget=DEFAULT_BUDGET, mode="transvection"):
    """(T_n): the elementary unitary group is transitive on each mu-class of
    unimodular vectors of H^n.  mode "full-u" uses full U(H^n) orbits.

    In transvection mode the BFS first runs under the reduced (basis-u)
    family, which is sound for a "holds" verdict; classes it leaves split
    are retried under the full u sweep before any "fails" verdict.
    """
    if mode == "transvection":
        H, gens = elementary_unitary_generators(ring, param, n, u_mode="basis")
    elif mode == "full-u":
        H = hyperbolic(param, n)
        gens = unitary_group(H, cap=budget)
    else:
        raise ValueError("unknown mode %r" % mode)
    classes = _mu_class_partition(H, budget)
    elems, index, perms = _gen_permutations(H, gens)
    visits = [0]
    stats = {"classes": len(classes), "generators": len(gens)}
    full_perms = None
    for rep_mu, members in sorted(classes.items()):
        member_idx = {index[x.vec] for x in members}
        seed = index[members[0].vec]
        if mode == "full-u":
            # the orbit under the whole group is the set of images of the seed
            visits[0] += len(perms)
            if visits[0] > budget:
                raise BudgetExceeded("full-U orbit budget")
            seen = {int(perm[seed]) for perm in perms}
        else:
            seen = _orbit_of(seed, perms, budget, visits)
        if seen & member_idx != member_idx and mode == "transvection":
            if full_perms is None:
                _, full_gens = elementary_unitary_generators(
                    ring, param, n, u_mode="all", H=H)
                _, _, full_perms = _gen_permutations(H, full_gens)
                stats["generators_full"] = len(full_gens)
            seen = _orbit_of(seed, full_perms, budget, visits)
        if seen != member_idx:
            missing = elems[next(iter(member_idx - seen))]
            return RangeReport(ring, "T", n, "fails",
                               witness={"mu": rep_mu,
                                        "orbit_size": len(seen),
                                        "class_size": len(member_idx),
                                        "unreached": list(missing.vec)},
                               stats=dict(stats, visits=visits[0]), mode=mode)
    return RangeReport(ring, "T", n, "holds",
                       stats=dict(stats, visits=visits[0]), mode=mode)


class UsrResult:
    def __init__(self, value, reports, semi_local_ok=None):
        self.value = value
        self.reports = reports
        self.semi_local_ok = semi_local_ok

    def __repr__(self):
        return "usr=%s" % (self.value if self.value is not None else ">max")


def unitary_stable_rank(ring, param, n_max, budget=DEFAULT_BUDGET,
                        mode="transvection"):
    """Least n <= n_max with (S_n) and (T_{n+1}).

    Cross-checks the semi-local bound usr <= 2 (every tabulated ring is
    finite, hence semi-local).
    """
    reports = []
    value = None
    for n in range(1, n_max + 1):
        s = check_Sn(ring, n, budget=budget)
        reports.append(s)
        if s.verdict != "holds":
            continue
        t = check_Tn(ring, param, n + 1, budget=budget, mode=mode)
        reports.append(t)
        if t.verdict == "holds":
            value = n
            break
    semi_local_ok = None
    if value is not None:
        semi_local_ok = value <= 2
    return UsrResult(value, reports, semi_local_ok)
