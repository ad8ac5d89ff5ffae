"""Finitely presented right modules over a tabulated finite ring.

A module is R^n modulo the R-span of relator columns.  Elements are stored
as canonical base-coordinate vectors (length n*d over Z/m), canonicalized by
Howell reduction against the expanded relation module, so equality and
hashing are exact.
"""

import itertools

from wittlab.linalg import LinearSolver, transpose, matvec
from wittlab.rings import RingError

ENUM_CAP = 4096


class CapExceeded(RuntimeError):
    pass


class Module:
    def __init__(self, ring, ngens, relators=(), name=None):
        self.ring = ring
        self.ngens = int(ngens)
        self.relators = tuple(tuple(int(c) for c in col) for col in relators)
        for col in self.relators:
            if len(col) != self.ngens:
                raise RingError("relator length != number of generators")
        d, m = ring.base_dim, ring.base_mod
        self.nd = self.ngens * d
        rows = []
        for col in self.relators:
            for t in ring.basis:
                row = []
                for c in col:
                    row.extend(int(x) for x in ring.to_base[ring.mul[c, t]])
                rows.append(row)
        self.rel = LinearSolver(rows, m, width=self.nd)
        self.size = m ** self.nd // self.rel.module_size
        self.name = name or "M(%s;%d gens,%d rels)" % (
            ring.name, self.ngens, len(self.relators))

    # -- element plumbing -------------------------------------------------

    def canon(self, vec):
        rep, _ = self.rel.reduce(vec)
        return tuple(rep)

    def element(self, blocks):
        """Element from a tuple of ring indices, one per generator."""
        ring = self.ring
        vec = []
        for a in blocks:
            vec.extend(int(x) for x in ring.to_base[a])
        return ModuleElement(self, self.canon(vec))

    def from_vec(self, vec):
        return ModuleElement(self, self.canon(vec))

    def zero(self):
        return ModuleElement(self, (0,) * self.nd)

    def gen(self, i):
        blocks = [self.ring.zero] * self.ngens
        blocks[i] = self.ring.one
        return self.element(blocks)

    def gens(self):
        return [self.gen(i) for i in range(self.ngens)]

    def elements(self, cap=ENUM_CAP):
        if self.size > cap:
            raise CapExceeded("module has %d elements, cap %d" % (self.size, cap))
        seen = set()
        for vec in self.rel.enumerate_canonical_reps():
            if vec not in seen:
                seen.add(vec)
                yield ModuleElement(self, vec)

    def add_vec(self, u, v):
        m = self.ring.base_mod
        return self.canon([(a + b) % m for a, b in zip(u, v)])

    def act_vec(self, vec, r):
        """vec * r (right action by a ring element)."""
        ring = self.ring
        d, m = ring.base_dim, ring.base_mod
        R = ring.Rmat[r]
        out = []
        for i in range(self.ngens):
            block = vec[i * d:(i + 1) * d]
            out.extend(int(sum(R[s, t] * block[t] for t in range(d))) % m
                       for s in range(d))
        return self.canon(out)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)


class ModuleElement:
    __slots__ = ("module", "vec")

    def __init__(self, module, vec):
        self.module = module
        self.vec = tuple(vec)

    def ring_blocks(self):
        ring = self.module.ring
        d = ring.base_dim
        return tuple(
            ring.index_of_coords(self.vec[i * d:(i + 1) * d])
            for i in range(self.module.ngens)
        )

    def __add__(self, other):
        return ModuleElement(self.module, self.module.add_vec(self.vec, other.vec))

    def __sub__(self, other):
        m = self.module.ring.base_mod
        return ModuleElement(
            self.module,
            self.module.canon([(a - b) % m for a, b in zip(self.vec, other.vec)]),
        )

    def __neg__(self):
        m = self.module.ring.base_mod
        return ModuleElement(self.module, self.module.canon([-a % m for a in self.vec]))

    def __mul__(self, r):
        return ModuleElement(self.module, self.module.act_vec(self.vec, int(r)))

    def is_zero(self):
        return not any(self.vec)

    def __eq__(self, other):
        return (
            isinstance(other, ModuleElement)
            and self.module is other.module
            and self.vec == other.vec
        )

    def __hash__(self):
        return hash(self.vec)

    def __repr__(self):
        return "<%s>" % (",".join(self.module.ring.label(b)
                                  for b in self.ring_blocks()))


def free_module(ring, n, name=None):
    return Module(ring, n, (), name=name or "%s^%d" % (ring.name, n))

def cyclic_module(ring, a, name=None):
    return Module(ring, 1, ((a,),), name=name or "%s/(%s)" % (ring.name, ring.label(a)))


def direct_sum_modules(A, B):
    ring = A.ring
    n = A.ngens + B.ngens
    rels = [tuple(col) + (ring.zero,) * B.ngens for col in A.relators]
    rels += [(ring.zero,) * A.ngens + tuple(col) for col in B.relators]
    S = Module(ring, n, rels, name="%s + %s" % (A.name, B.name))

    def inj_a(x):
        return S.from_vec(list(x.vec) + [0] * B.nd)

    def inj_b(x):
        return S.from_vec([0] * A.nd + list(x.vec))

    return S, inj_a, inj_b


# -- functionals -----------------------------------------------------------


class Functional:
    """An R-linear functional M -> R given by its values on the generators."""

    __slots__ = ("module", "values")

    def __init__(self, module, values):
        self.module = module
        self.values = tuple(int(v) for v in values)

    def __call__(self, x):
        ring = self.module.ring
        acc = ring.zero
        for c, a in zip(self.values, x.ring_blocks()):
            acc = int(ring.add[acc, ring.mul[c, a]])
        return acc

    def coords_on(self, vec):
        """Base coordinates of the value on a raw vector."""
        ring = self.module.ring
        d, m = ring.base_dim, ring.base_mod
        out = [0] * d
        for i, c in enumerate(self.values):
            block = vec[i * d:(i + 1) * d]
            L = ring.Lmat[c]
            for s in range(d):
                out[s] = (out[s] + sum(int(L[s, t]) * block[t] for t in range(d))) % m
        return out

    def __eq__(self, other):
        return (isinstance(other, Functional) and self.module is other.module
                and self.values == other.values)

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "phi%s" % (self.values,)


def _functional_constraint_rows(M, elems):
    """Rows (one per functional unknown (i,t)) of the evaluation matrix.

    Columns: d entries per relator (the value on the relator, which must
    vanish) followed by d entries per element of `elems` (the value there).
    """
    ring = M.ring
    d = ring.base_dim
    cols = list(M.relators) + [x.ring_blocks() for x in elems]
    rows = []
    for i in range(M.ngens):
        for t in ring.basis:
            row = []
            for col in cols:
                row.extend(int(v) for v in ring.to_base[ring.mul[t, col[i]]])
            rows.append(row)
    return rows, d * len(M.relators)


def functional_space(M):
    """LinearSolver whose row module is the set of all functionals M -> R
    (as base-coordinate vectors of their generator values)."""
    rows, _ = _functional_constraint_rows(M, [])
    if not rows:
        return LinearSolver([], M.ring.base_mod, width=0)
    solver = LinearSolver(rows, M.ring.base_mod)
    return LinearSolver(solver.kernel_rows(), M.ring.base_mod, width=M.nd)


def functional_from_coords(M, gamma):
    ring = M.ring
    d = ring.base_dim
    values = [ring.index_of_coords(gamma[i * d:(i + 1) * d]) for i in range(M.ngens)]
    return Functional(M, values)


def all_functionals(M, cap=ENUM_CAP):
    space = functional_space(M)
    if space.module_size > cap:
        raise CapExceeded("functional space too large")
    return [functional_from_coords(M, v) for v in space.enumerate_module()]


def is_unimodular(M, seq):
    """Dual maps phi_j with phi_j(v_i) = delta_ij, or None.

    A sequence admitting functionals with invertible value matrix admits
    corrected duals, so solvability of the delta system is the exact
    criterion.
    """
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    ring = M.ring
    d, m = ring.base_dim, ring.base_mod
    rows, nrel_cols = _functional_constraint_rows(M, seq)
    solver = LinearSolver(rows, m, width=nrel_cols + d * len(seq))
    k = len(seq)
    one = [int(v) for v in ring.to_base[ring.one]]
    witnesses = []
    for j in range(k):
        target = [0] * nrel_cols
        for i in range(k):
            target.extend(one if i == j else [0] * d)
        gamma = solver.solve(target)
        if gamma is None:
            return None
        witnesses.append(functional_from_coords(M, gamma))
    return witnesses


def is_unimodular_bruteforce(M, seq, cap=ENUM_CAP):
    """Definitional oracle: search all functional tuples for an invertible
    value matrix (an invertible matrix corrects to Kronecker duals),
    independent of the solver path."""
    seq = list(seq)
    funcs = all_functionals(M, cap=cap)
    k = len(seq)
    for combo in itertools.product(funcs, repeat=k):
        B = [[combo[j](seq[i]) for j in range(k)] for i in range(k)]
        if ring_matrix_invertible(M.ring, B):
            return True
    return False


def ring_matrix_invertible(ring, B):
    """Is a k x k matrix over R invertible (as a map of right modules)?"""
    k = len(B)
    d, m = ring.base_dim, ring.base_mod
    rows = []
    for j in range(k):  # unknown-column index
        for t in ring.basis:
            row = []
            for i in range(k):
                row.extend(int(v) for v in ring.to_base[ring.mul[B[i][j], t]])
            rows.append(row)
    solver = LinearSolver(rows, m)
    return solver.module_size == m ** (k * d)


def rank(M, cap=ENUM_CAP):
    """Largest n with a unimodular length-n sequence (incremental search)."""
    if M.size == 1:
        return 0
    bound = 0
    size = M.size
    while size % M.ring.size == 0 and size > 1:
        size //= M.ring.size
        bound += 1
    if bound == 0:
        return 0
    elems = list(M.elements(cap=cap))
    best = [0]

    def dfs(seq, span_rows):
        if len(seq) > best[0]:
            best[0] = len(seq)
        if best[0] >= bound:
            return
        span = LinearSolver(span_rows, M.ring.base_mod, width=M.nd)
        for v in elems:
            if v.is_zero() or span.contains(v.vec):
                continue
            if is_unimodular(M, seq + [v]) is not None:
                rows = span_rows + [list(M.act_vec(v.vec, t)) for t in M.ring.basis]
                dfs(seq + [v], rows)
                if best[0] >= bound:
                    return

    base_rows = [list(r) for r in M.rel.H]
    dfs([], base_rows)
    return best[0]


# -- maps ------------------------------------------------------------------


class ModuleMap:
    def __init__(self, domain, codomain, images, check=True):
        self.domain = domain
        self.codomain = codomain
        self.images = tuple(images)
        ring = domain.ring
        d = ring.base_dim
        cols = []
        for x in self.images:
            for t in ring.basis:
                cols.append(codomain.act_vec(x.vec, t))
        self.B = transpose(cols) if cols else [[] for _ in range(codomain.nd)]
        if check and not self.well_defined():
            raise RingError("map does not respect the relations")
        self._pre = None

    def well_defined(self):
        m = self.domain.ring.base_mod
        for hr in self.domain.rel.H:
            img = matvec(self.B, hr, m)
            if any(self.codomain.canon(img)):
                return False
        return True

    def __call__(self, x):
        m = self.domain.ring.base_mod
        return self.codomain.from_vec(matvec(self.B, x.vec, m))

    def _preimage_solver(self):
        """Solver over (x | c) for B@x + c-combination-of-relations = target."""
        if self._pre is None:
            m = self.domain.ring.base_mod
            rows = transpose(self.B)
            rows = [list(r) for r in rows] + [list(r) for r in self.codomain.rel.H]
            self._pre = LinearSolver(rows, m, width=self.codomain.nd)
        return self._pre

    def preimage(self, y):
        """One x with map(x) == y, or None."""
        sol = self._preimage_solver().solve(list(y.vec))
        if sol is None:
            return None
        return self.domain.from_vec(sol[:self.domain.nd])

    def kernel_preimage_size(self):
        """|{x in (Z/m)^nd : B@x lies in the codomain relation module}|."""
        ker = self._preimage_solver().kernel_rows()
        proj = [row[:self.domain.nd] for row in ker]
        return LinearSolver(proj, self.domain.ring.base_mod,
                            width=self.domain.nd).module_size

    def kernel_module(self):
        """The kernel as a presented submodule of the domain."""
        ker = self._preimage_solver().kernel_rows()
        proj = [row[:self.domain.nd] for row in ker]
        sol = LinearSolver(proj, self.domain.ring.base_mod, width=self.domain.nd)
        gens = [self.domain.from_vec(list(r)) for r in sol.H]
        return submodule(self.domain, gens)

    def is_injective(self):
        return self.kernel_preimage_size() == self.domain.rel.module_size

    def is_bijective(self):
        return self.domain.size == self.codomain.size and self.is_injective()

    def inverse(self):
        if not self.is_bijective():
            raise RingError("map is not invertible")
        imgs = []
        for j in range(self.codomain.ngens):
            x = self.preimage(self.codomain.gen(j))
            if x is None:
                raise RingError("map is not surjective")
            imgs.append(x)
        inv = ModuleMap(self.codomain, self.domain, imgs)
        return inv

    def compose(self, other):
        """self after other."""
        return ModuleMap(other.domain, self.codomain,
                         [self(other(g)) for g in other.domain.gens()],
                         check=False)

    def key(self):
        return tuple(x.vec for x in self.images)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.domain is other.domain
                and self.codomain is other.codomain and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())


def identity_map(M):
    return ModuleMap(M, M, M.gens(), check=False)


def submodule(M, gens):
    """Present the R-span of `gens` inside M; returns (K, inclusion).

    Generators lying in the span of the others are dropped first.
    """
    ring = M.ring
    m = ring.base_mod
    gens = [g for g in gens if not g.is_zero()]
    # greedy minimization
    changed = True
    while changed:
        changed = False
        for idx in range(len(gens)):
            others = gens[:idx] + gens[idx + 1:]
            rows = [list(r) for r in M.rel.H]
            for g in others:
                rows.extend(list(M.act_vec(g.vec, t)) for t in ring.basis)
            if LinearSolver(rows, m, width=M.nd).contains(gens[idx].vec):
                gens.pop(idx)
                changed = True
                break
    s = len(gens)
    if s == 0:
        K = Module(ring, 0, (), name="0")
        return K, ModuleMap(K, M, [], check=False)
    # relation module of the presentation R^s ->> span
    d = ring.base_dim
    rows = []
    for g in gens:
        for t in ring.basis:
            rows.append(list(M.act_vec(g.vec, t)))
    rows += [list(r) for r in M.rel.H]
    pre = LinearSolver(rows, m, width=M.nd)
    ker = [row[:s * d] for row in pre.kernel_rows()]
    ker_sol = LinearSolver(ker, m, width=s * d)
    relators = []
    for row in ker_sol.H:
        relators.append(tuple(ring.index_of_coords(row[i * d:(i + 1) * d])
                              for i in range(s)))
    K = Module(ring, s, relators)
    incl = ModuleMap(K, M, gens)
    return K, incl


def split_summand(M, seq, witnesses=None):
    """Split M as R^k + complement along a unimodular sequence.

    Returns (K, incl, duals) with K the kernel of the dual tuple, incl its
    inclusion, duals the corrected functionals.
    """
    if witnesses is None:
        witnesses = is_unimodular(M, seq)
    if witnesses is None:
        raise RingError("sequence is not unimodular")
    ring = M.ring
    d, m = ring.base_dim, ring.base_mod
    # kernel of x -> (phi_j(x))_j
    rows = []
    for i in range(M.ngens):
        for t_i in range(d):
            unit = [0] * M.nd
            unit[i * d + t_i] = 1
            row = []
            for phi in witnesses:
                row.extend(phi.coords_on(unit))
            rows.append(row)
    solver = LinearSolver(rows, m)
    ker_rows = solver.kernel_rows()
    gens = [M.from_vec(list(r)) for r in
            LinearSolver(ker_rows, m, width=M.nd).H]
    K, incl = submodule(M, gens)
    if K.size * ring.size ** len(seq) != M.size:
        raise RingError("splitting sizes inconsistent")
    return K, incl, witnesses


def is_isomorphic(M, N, cap=ENUM_CAP):
    """An explicit isomorphism M -> N, or None (exhaustive within cap)."""
    if M.size != N.size:
        return None
    if M.size == 1:
        return ModuleMap(M, N, [N.zero() for _ in range(M.ngens)], check=False)
    if _annihilator_profile(M) != _annihilator_profile(N):
        return None
    ring = M.ring
    m = ring.base_mod
    n_elems = list(N.elements(cap=cap))
    anns = [_generator_annihilator(M, i) for i in range(M.ngens)]

    rel_cols = list(M.relators)

    def dfs(assigned):
        i = len(assigned)
        if i == M.ngens:
            f = ModuleMap(M, N, assigned, check=True)
            if f.is_bijective():
                return f
            return None
        for h in n_elems:
            ok = True
            for r in anns[i]:
                if not (h * r).is_zero():
                    ok = False
                    break
            if not ok:
                continue
            if not _partial_consistent(M, N, assigned + [h], rel_cols):
                continue
            got = dfs(assigned + [h])
            if got is not None:
                return got
        return None

    return dfs([])


def _generator_annihilator(M, i):
    ring = M.ring
    g = M.gen(i)
    return [r for r in range(ring.size) if (g * r).is_zero()]


def _annihilator_profile(M):
    """|ker(x -> x*r)| per ring element; invariant under isomorphism."""
    ring = M.ring
    prof = []
    for r in range(ring.size):
        f = ModuleMap(M, M, [g * r for g in M.gens()], check=False)
        prof.append(f.kernel_preimage_size() // M.rel.module_size)
    return tuple(prof)


def _partial_consistent(M, N, assigned, rel_cols):
    """Can the remaining generator images be chosen to satisfy the relations?"""
    if not rel_cols:
        return True
    ring = M.ring
    d, m = ring.base_dim, ring.base_mod
    j = len(assigned)
    rest = M.ngens - j
    width = N.nd * len(rel_cols)
    # target: -(sum over assigned generators of h_i * rho_i) per relator
    target = []
    for col in rel_cols:
        acc = N.zero()
        for i in range(j):
            acc = acc + assigned[i] * col[i]
        target.extend((-a) % m for a in acc.vec)
    if rest == 0:
        return not any(N.canon(target[k * N.nd:(k + 1) * N.nd]) != (0,) * N.nd
                       for k in range(len(rel_cols)))
    rows = []
    for i in range(rest):
        for s in range(N.nd):
            unit = [0] * N.nd
            unit[s] = 1
            row = []
            for col in rel_cols:
                row.extend(N.act_vec(unit, col[j + i]))
            rows.append(row)
    # allow adjusting by the relation module of N in every relator slot
    for k in range(len(rel_cols)):
        for hr in N.rel.H:
            row = [0] * width
            row[k * N.nd:(k + 1) * N.nd] = list(hr)
            rows.append(row)
    return LinearSolver(rows, m, width=width).contains(target)


# -- GL transitivity -------------------------------------------------------


def elementary_automorphisms(M, cap=512):
    """Transvections x -> x + v*phi(x) with phi(v) = 0, plus central units."""
    ring = M.ring
    autos = []
    space = functional_space(M)
    if space.module_size <= cap:
        funcs = [functional_from_coords(M, v) for v in space.enumerate_module()]
    else:
        funcs = [functional_from_coords(M, list(r)) for r in space.H]
    cand_vs = M.gens() + [-g for g in M.gens()]
    for v in cand_vs:
        for phi in funcs:
            if phi(v) == ring.zero:
                imgs = [g + v * phi(g) for g in M.gens()]
                f = ModuleMap(M, M, imgs, check=False)
                autos.append(f)
    for u in ring.units:
        if u in ring.central and u != ring.one:
            autos.append(ModuleMap(M, M, [g * u for g in M.gens()], check=False))
    return autos


def gl_transitive_check(M, sr=None, cap=ENUM_CAP):
    """Do all split injections R -> M lie in one GL(M)-orbit?

    BFS under elementary automorphisms fuses cheaply; remaining class
    distinctions are resolved exactly via complement isomorphism.
    """
    if sr is None:
        from wittlab import stable_range

        sr = stable_range.stable_rank(M.ring, 3).value
    rk = rank(M, cap=cap)
    report = {
        "module": M.name,
        "rank": rk,
        "sr": sr,
        "applicable": sr is not None and rk >= sr + 1,
    }
    uni = [x for x in M.elements(cap=cap)
           if is_unimodular(M, [x]) is not None]
    report["unimodular_count"] = len(uni)
    if not uni:
        report["orbits"] = 0
        report["single_orbit"] = True
        return report
    autos = elementary_automorphisms(M)
    index = {x: i for i, x in enumerate(uni)}
    parent = list(range(len(uni)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for x in uni:
        for f in autos:
            y = f(x)
            if y in index:
                union(index[x], index[y])
    classes = {}
    for i, x in enumerate(uni):
        classes.setdefault(find(i), []).append(x)
    # exact fusion via complement isomorphism
    comps = {}

    def comp_of(x):
        if x not in comps:
            K, _, _ = split_summand(M, [x])
            comps[x] = K
        return comps[x]

    roots = list(classes)
    buckets = [[roots[0]]]
    for rt in roots[1:]:
        x = classes[rt][0]
        placed = False
        for bucket in buckets:
            if is_isomorphic(comp_of(classes[bucket[0]][0]), comp_of(x)) is not None:
                bucket.append(rt)
                placed = True
                break
        if not placed:
            buckets.append([rt])
    report["orbits"] = len(buckets)
    report["single_orbit"] = len(buckets) == 1
    report["class_sizes"] = sorted(sum(len(classes[rt]) for rt in b) for b in buckets)
    return report
