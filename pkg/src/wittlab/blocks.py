"""n x k blocks, constructive matrix reducibility, and the pipelines built
on them: hyperbolic straightening, the transitive move, and cancellation.

A block is an n x k ring matrix over R plus a row of k anti-linear
functionals M -> R ("an n x k block has in fact n+1 rows").  The three
legal moves are left multiplication by a unipotent matrix with a module
column, left multiplication by GL_n, and right multiplication by GL_k;
certificates record the moves and replay exactly.
"""

import itertools

from wittlab.linalg import LinearSolver
from wittlab.modules import Module, ModuleMap
from wittlab.quadratic import (
    UnitaryMap,
    direct_sum_quadratic,
    hyperbolic,
    identity_unitary,
    is_lambda_unimodular,
    orthogonal_complement,
    sub_quadratic,
    transvection,
    witt_index,
)

SEARCH_BUDGET = 1 << 20


class BlockError(ValueError):
    pass


# -- ring matrix helpers -----------------------------------------------------


def rmat_mul(ring, A, B):
    n, k = len(A), len(B[0])
    t = len(B)
    out = [[ring.zero] * k for _ in range(n)]
    for i in range(n):
        for j in range(k):
            acc = ring.zero
            for l in range(t):
                acc = int(ring.add[acc, ring.mul[A[i][l], B[l][j]]])
            out[i][j] = acc
    return out


def rmat_identity(ring, n):
    return [[ring.one if i == j else ring.zero for j in range(n)]
            for i in range(n)]


def ring_matrix_left_inverse(ring, B):
    """A k x n left inverse of an n x k matrix over R, or None."""
    n = len(B)
    k = len(B[0]) if n else 0
    d, m = ring.base_dim, ring.base_mod
    rows = []
    for l in range(n):  # unknown r'_l
        for t in ring.basis:
            row = []
            for j in range(k):
                row.extend(int(v) for v in ring.to_base[
                    ring.mul[ring.mul[t, B[l][j]], ring.one]])
            rows.append(row)
    solver = LinearSolver(rows, m, width=d * k)
    one = [int(v) for v in ring.to_base[ring.one]]
    out = []
    for i in range(k):
        target = []
        for j in range(k):
            target.extend(one if i == j else [0] * d)
        sol = solver.solve(target)
        if sol is None:
            return None
        out.append([ring.index_of_coords(sol[l * d:(l + 1) * d])
                    for l in range(n)])
    return out


def ring_matrix_inverse(ring, C):
    n = len(C)
    inv = ring_matrix_left_inverse(ring, C)
    if inv is None:
        raise BlockError("matrix not invertible")
    # left inverse of a square matrix over a finite ring is the inverse
    if rmat_mul(ring, C, inv) != rmat_identity(ring, n):
        raise BlockError("one-sided inverse is not two-sided")
    return inv


def row_left_coefficients(ring, row):
    """c with sum c_i row_i = 1, or None."""
    d, m = ring.base_dim, ring.base_mod
    rows = []
    for r in row:
        for t in ring.basis:
            rows.append([int(v) for v in ring.to_base[ring.mul[t, r]]])
    solver = LinearSolver(rows, m, width=d)
    sol = solver.solve([int(v) for v in ring.to_base[ring.one]])
    if sol is None:
        return None
    return [ring.index_of_coords(sol[i * d:(i + 1) * d]) for i in range(len(row))]


def shorten_row(ring, row, budget=SEARCH_BUDGET):
    """t in R^n with (row_i + t_i * last) unimodular, first found in a
    support-growing sweep; None if the sweep exhausts the budget."""
    n = len(row) - 1
    last = row[n]

    def shortened(t):
        return tuple(int(ring.add[row[i], ring.mul[t[i], last]])
                     for i in range(n))

    zero = tuple([ring.zero] * n)
    if row_left_coefficients(ring, shortened(zero)) is not None:
        return list(zero)
    visits = 0
    for support in range(1, n + 1):
        for positions in itertools.combinations(range(n), support):
            for vals in itertools.product(range(1, ring.size), repeat=support):
                visits += 1
                if visits > budget:
                    return None
                t = [ring.zero] * n
                for p, v in zip(positions, vals):
                    t[p] = v
                if row_left_coefficients(ring, shortened(t)) is not None:
                    return t
    return None


def gl_column_to_e1(ring, col, budget=SEARCH_BUDGET):
    """C in GL_n with C*col = e_1, built from elementary row operations.

    Needs n >= 2 and the shortening search to succeed (guaranteed when
    n - 1 >= sr(R)); raises otherwise.
    """
    n = len(col)
    if n < 2:
        raise BlockError("column reduction needs n >= 2")
    work = list(col)
    C = rmat_identity(ring, n)

    def row_op(i, j, t):
        # row_i += t * row_j
        work[i] = int(ring.add[work[i], ring.mul[t, work[j]]])
        C[i] = [int(ring.add[C[i][s], ring.mul[t, C[j][s]]]) for s in range(n)]

    t = shorten_row(ring, work, budget=budget)
    if t is None:
        raise BlockError("stable-range shortening failed")
    for i in range(n - 1):
        if t[i] != ring.zero:
            row_op(i, n - 1, t[i])
    coeffs = row_left_coefficients(ring, work[:n - 1])
    if coeffs is None:
        raise BlockError("shortened column is not unimodular")
    factor = int(ring.sub(ring.one, work[n - 1]))
    for i in range(n - 1):
        c = int(ring.mul[factor, coeffs[i]])
        if c != ring.zero:
            row_op(n - 1, i, c)
    assert work[n - 1] == ring.one
    for i in range(n - 1):
        if work[i] != ring.zero:
            row_op(i, n - 1, int(ring.neg[work[i]]))
    # swap rows 0 and n-1
    work[0], work[n - 1] = work[n - 1], work[0]
    C[0], C[n - 1] = C[n - 1], C[0]
    assert work[0] == ring.one and all(w == ring.zero for w in work[1:])
    return C


# -- anti-linear functionals and blocks ---------------------------------------


class AntiFunctional:
    """f: M -> R with f(x*a) = conj(a) f(x), stored by generator values."""

    __slots__ = ("module", "values")

    def __init__(self, module, values, check=True):
        self.module = module
        self.values = tuple(int(v) for v in values)
        if check:
            ring = module.ring
            for rho in module.relators:
                acc = ring.zero
                for c, t in zip(rho, self.values):
                    acc = int(ring.add[acc, ring.mul[ring.conj[c], t]])
                if acc != ring.zero:
                    raise BlockError("functional does not kill a relator")

    def __call__(self, x):
        ring = self.module.ring
        acc = ring.zero
        for a, t in zip(x.ring_blocks(), self.values):
            acc = int(ring.add[acc, ring.mul[ring.conj[a], t]])
        return acc

    def coords_on(self, vec):
        """Base coordinates of the value on a raw coordinate vector."""
        ring = self.module.ring
        d, m = ring.base_dim, ring.base_mod
        out = [0] * d
        for i, t in enumerate(self.values):
            block = vec[i * d:(i + 1) * d]
            for s in range(d):
                if block[s]:
                    val = ring.mul[ring.conj[ring.basis[s]], t]
                    co = ring.to_base[val]
                    for u in range(d):
                        out[u] = (out[u] + block[s] * int(co[u])) % m
        return out

    def scale_left(self, s):
        """s . f : x -> s * f(x), which equals x -> f(x * conj(s))."""
        ring = self.module.ring
        return AntiFunctional(
            self.module, [int(ring.mul[s, t]) for t in self.values], check=False)

    def scale_right(self, r):
        """f . r : x -> f(x) * r."""
        ring = self.module.ring
        return AntiFunctional(
            self.module, [int(ring.mul[t, r]) for t in self.values], check=False)

    def add(self, other):
        ring = self.module.ring
        return AntiFunctional(
            self.module,
            [int(ring.add[a, b]) for a, b in zip(self.values, other.values)],
            check=False)

    def key(self):
        return self.values


class Block:
    """matrix: n x k over R; funcs: k anti-linear maps M -> R."""

    def __init__(self, module, matrix, funcs):
        self.module = module
        self.ring = module.ring
        self.matrix = [[int(v) for v in row] for row in matrix]
        self.funcs = list(funcs)
        self.n = len(self.matrix)
        self.k = len(self.funcs)
        for row in self.matrix:
            if len(row) != self.k:
                raise BlockError("ragged block matrix")
        for f in self.funcs:
            if f.module is not module:
                raise BlockError("functional on the wrong module")

    def copy(self):
        return Block(self.module, [row[:] for row in self.matrix],
                     list(self.funcs))

    def key(self):
        return (tuple(map(tuple, self.matrix)),
                tuple(f.key() for f in self.funcs))

    def __eq__(self, other):
        return isinstance(other, Block) and self.module is other.module \
            and self.key() == other.key()


def block_act(A, move):
    """Apply one legal move; returns a new block.

    Moves: ("left_unipotent", [m_1..m_n])      module column,
           ("left_gl", C)                      C in GL_n,
           ("right", D)                        D in GL_k.
    """
    ring = A.ring
    kind = move[0]
    if kind == "left_unipotent":
        column = move[1]
        if len(column) != A.n:
            raise BlockError("module column has wrong length")
        matrix = [[int(ring.add[A.matrix[i][j], A.funcs[j](column[i])])
                   for j in range(A.k)] for i in range(A.n)]
        return Block(A.module, matrix, A.funcs)
    if kind == "left_gl":
        C = move[1]
        if len(C) != A.n:
            raise BlockError("GL_n block has wrong size")
        ring_matrix_inverse(ring, C)  # raises if singular
        return Block(A.module, rmat_mul(ring, C, A.matrix), A.funcs)
    if kind == "right":
        D = move[1]
        if len(D) != A.k:
            raise BlockError("GL_k block has wrong size")
        ring_matrix_inverse(ring, D)
        matrix = rmat_mul(ring, A.matrix, D)
        funcs = []
        for j in range(A.k):
            f = A.funcs[0].scale_right(D[0][j])
            for l in range(1, A.k):
                f = f.add(A.funcs[l].scale_right(D[l][j]))
            funcs.append(f)
        return Block(A.module, matrix, funcs)
    raise BlockError("unknown move %r" % (kind,))


def is_unimodular_block(A):
    """A left inverse (r' k x n over R, m' in M^k) with A_L * A = 1, or None."""
    ring = A.ring
    M = A.module
    d, m = ring.base_dim, ring.base_mod
    rows = []
    for l in range(A.n):  # ring unknowns r'_l
        for t in ring.basis:
            row = []
            for j in range(A.k):
                row.extend(int(v) for v in ring.to_base[
                    ring.mul[t, A.matrix[l][j]]])
            rows.append(row)
    for s in range(M.nd):  # module unknown coordinates
        unit = [0] * M.nd
        unit[s] = 1
        row = []
        for j in range(A.k):
            row.extend(A.funcs[j].coords_on(unit))
        rows.append(row)
    solver = LinearSolver(rows, m, width=d * A.k)
    one = [int(v) for v in ring.to_base[ring.one]]
    rprime = []
    mprime = []
    for i in range(A.k):
        target = []
        for j in range(A.k):
            target.extend(one if i == j else [0] * d)
        sol = solver.solve(target)
        if sol is None:
            return None
        rprime.append([ring.index_of_coords(sol[l * d:(l + 1) * d])
                       for l in range(A.n)])
        mprime.append(M.from_vec(sol[A.n * d:]))
    return rprime, mprime


def is_unimodular_block_bruteforce(A, cap=1 << 22):
    """Exhaustive left-inverse search (oracle for small blocks)."""
    ring = A.ring
    M = A.module
    elems = list(M.elements())
    count = (ring.size ** A.n) * len(elems)
    if count ** A.k > cap:
        raise BlockError("oracle too large")
    singles = []
    for rvals in itertools.product(range(ring.size), repeat=A.n):
        for mp in elems:
            singles.append((rvals, mp))

    def row_ok(i, cand):
        rvals, mp = cand
        for j in range(A.k):
            acc = ring.zero
            for l in range(A.n):
                acc = int(ring.add[acc, ring.mul[rvals[l], A.matrix[l][j]]])
            acc = int(ring.add[acc, A.funcs[j](mp)])
            want = ring.one if i == j else ring.zero
            if acc != want:
                return False
        return True

    options = []
    for i in range(A.k):
        opts = [cand for cand in singles if row_ok(i, cand)]
        if not opts:
            return False
        options.append(opts)
    return True


# -- matrix reducibility -------------------------------------------------------


class ReductionCertificate:
    """Moves plus outputs; replay() re-applies the moves and compares."""

    def __init__(self, block, moves, m_column, top_matrix, q_matrix=None):
        self.block = block
        self.moves = list(moves)
        self.m_column = list(m_column)
        self.top_matrix = [row[:] for row in top_matrix]
        self.q_matrix = None if q_matrix is None else [r[:] for r in q_matrix]

    def replay(self):
        cur = self.block
        for move in self.moves:
            cur = block_act(cur, move)
        return cur

    def replay_ok(self):
        cur = self.replay()
        got = [cur.matrix[i][:] for i in range(len(self.top_matrix))]
        return got == self.top_matrix


def _conj_twist(ring, S, column):
    """(S ? column)_i = sum_l column_l * conj(S_il): the module-column part of
    composing left transforms [[S,.],[0,1]]."""
    n = len(S)
    out = []
    for i in range(n):
        acc = None
        for l in range(n):
            c = int(ring.conj[S[i][l]])
            if c == ring.zero:
                continue
            term = column[l] * c
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else column[0].module.zero()
                   if column else None)
    return out


def matrix_reduce(A, sr, budget=SEARCH_BUDGET):
    """A vector m in M^n such that the unipotent move with column m makes the
    top n x k matrix unimodular, following the inductive proof (base case via
    a stable-range correction, inductive step via a GL_n pivot and a right
    move).  Requires k + sr <= n + 1 and a unimodular block."""
    ring = A.ring
    M = A.module
    n, k = A.n, A.k
    if k + sr > n + 1:
        raise BlockError("matrix reduction needs k + sr <= n + 1")
    left_inv = is_unimodular_block(A)
    if left_inv is None:
        raise BlockError("block is not unimodular")
    rprime, mprime = left_inv

    if k == 1:
        c = A.funcs[0](mprime[0])
        row = tuple(A.matrix[i][0] for i in range(n)) + (c,)
        t = shorten_row(ring, row, budget=budget)
        if t is None:
            raise BlockError("stable-range shortening failed in the base case")
        m_col = [mprime[0] * int(ring.conj[t[i]]) for i in range(n)]
        cert = ReductionCertificate(
            A, [("left_unipotent", m_col)], m_col,
            block_act(A, ("left_unipotent", m_col)).matrix)
        B = cert.top_matrix
        if ring_matrix_left_inverse(ring, B) is None:
            raise BlockError("base case produced a non-unimodular top")
        return cert

    # inductive step (here n >= sr + 1)
    c = A.funcs[0](mprime[0])
    row = tuple(A.matrix[i][0] for i in range(n)) + (c,)
    t = shorten_row(ring, row, budget=budget)
    if t is None:
        raise BlockError("stable-range shortening failed")
    m1 = [mprime[0] * int(ring.conj[t[i]]) for i in range(n)]
    A_a = block_act(A, ("left_unipotent", m1))
    col1 = [A_a.matrix[i][0] for i in range(n)]
    C = gl_column_to_e1(ring, col1, budget=budget)
    A_1 = block_act(A_a, ("left_gl", C))
    # right move clearing the first row
    D = rmat_identity(ring, k)
    for j in range(1, k):
        D[0][j] = int(ring.neg[A_1.matrix[0][j]])
    A_2 = block_act(A_1, ("right", D))
    # sub-block on rows 2..n, columns 2..k
    sub = Block(M, [row[1:] for row in A_2.matrix[1:]], A_2.funcs[1:])
    sub_cert = matrix_reduce(sub, sr, budget=budget)
    m4 = [M.zero()] + sub_cert.m_column
    Cinv = ring_matrix_inverse(ring, C)
    twisted = _conj_twist(ring, Cinv, m4)
    m_col = [a + b for a, b in zip(m1, twisted)]
    moved = block_act(A, ("left_unipotent", m_col))
    if ring_matrix_left_inverse(ring, moved.matrix) is None:
        raise BlockError("inductive step produced a non-unimodular top")
    return ReductionCertificate(A, [("left_unipotent", m_col)], m_col,
                                moved.matrix)


def _sk_step(B_matrix, ring, sr, budget=SEARCH_BUDGET):
    """Matrix stable-range step: r in R^(rows-1) such that adding r_i *
    (last row) to the other rows leaves the top unimodular.  Realized by a
    matrix reduction over the module R whose functional row is
    x -> conj(x) * b_j, which specializes blocks to plain matrices."""
    rows = len(B_matrix)
    k = len(B_matrix[0])
    R1 = Module(ring, 1, (), name="%s as module" % ring.name)
    funcs = [AntiFunctional(R1, [B_matrix[rows - 1][j]], check=False)
             for j in range(k)]
    induced = Block(R1, [row[:] for row in B_matrix[:rows - 1]], funcs)
    cert = matrix_reduce(induced, sr, budget=budget)
    r = [int(ring.conj[x.ring_blocks()[0]]) for x in cert.m_column]
    return r


def reduce_keep_tail(A, n_top, l, sr, budget=SEARCH_BUDGET):
    """Structured reduction: a module column m supported on the first n_top
    rows (plus, in the mixing form, a ring matrix Q folding the middle l rows
    into the top) leaving the last l+1 rows of the block untouched while the
    top n x k matrix becomes unimodular.  Needs k + sr <= n_top + 1, l > 0."""
    ring = A.ring
    M = A.module
    n, k = n_top, A.k
    if A.n != n + l or l <= 0:
        raise BlockError("row split does not match the block")
    if k + sr > n + 1:
        raise BlockError("keep-tail reduction needs k + sr <= n_top + 1")
    base = matrix_reduce(A, sr, budget=budget)
    # composed left transform (S, c) with S in GL_{n+l}, c a module column
    S = rmat_identity(ring, n + l)
    c = list(base.m_column)
    B_cur = [row[:] for row in base.top_matrix]
    # peel the bottom rows one at a time with (S^k) steps
    for peel in range(l):
        rows = n + l - peel
        r = _sk_step([row[:] for row in B_cur[:rows]], ring, sr, budget=budget)
        S_step = rmat_identity(ring, n + l)
        for i in range(rows - 1):
            S_step[i][rows - 1] = r[i]
        S = rmat_mul(ring, S_step, S)
        c = _conj_twist(ring, S_step, c)
        B_cur = [[int(ring.add[B_cur[i][j], ring.mul[r[i], B_cur[rows - 1][j]]])
                  if i < rows - 1 else B_cur[i][j] for j in range(k)]
                 for i in range(len(B_cur))]
    # S = [[1_n, X], [0, U]] with U upper unipotent; normalize the middle
    U = [[S[n + a][n + b] for b in range(l)] for a in range(l)]
    Uinv = ring_matrix_inverse(ring, U)
    S_fix = rmat_identity(ring, n + l)
    for a in range(l):
        for b in range(l):
            S_fix[n + a][n + b] = Uinv[a][b]
    S = rmat_mul(ring, S_fix, S)
    c = _conj_twist(ring, S_fix, c)
    # clear the middle module entries (row ops sourced at the corner row)
    c = [c[i] if i < n else M.zero() for i in range(n + l)]
    Q = [[S[i][n + b] for b in range(l)] for i in range(n)]
    m_col = c[:n]
    # verify the canonical form of the transform
    for i in range(n):
        for j in range(n):
            want = ring.one if i == j else ring.zero
            if S[i][j] != want:
                raise BlockError("transform top-left is not the identity")
    for a in range(l):
        for i in range(l):
            want = ring.one if a == i else ring.zero
            if S[n + a][n + i] != want:
                raise BlockError("transform middle is not the identity")
        for j in range(n):
            if S[n + a][j] != ring.zero:
                raise BlockError("transform below the diagonal")
    # mixing-form replay: top + Q*mid + f(m) unimodular, tail untouched
    top = [[int(ring.add[A.matrix[i][j], A.funcs[j](m_col[i])])
            for j in range(k)] for i in range(n)]
    for i in range(n):
        for j in range(k):
            acc = top[i][j]
            for b in range(l):
                acc = int(ring.add[acc, ring.mul[Q[i][b], A.matrix[n + b][j]]])
            top[i][j] = acc
    if ring_matrix_left_inverse(ring, top) is None:
        raise BlockError("keep-tail reduction failed to produce a unimodular top")
    # plain-form replay: the unipotent move alone leaves the whole matrix
    # (not just the top block) unimodular
    padded = m_col + [M.zero()] * l
    whole = block_act(A, ("left_unipotent", padded))
    if ring_matrix_left_inverse(ring, whole.matrix) is None:
        raise BlockError("whole-matrix form is not unimodular")
    # mixing-form moves: left_gl with S = [[1,Q],[0,1]] then the unipotent
    replayed = block_act(block_act(A, ("left_gl", S)), ("left_unipotent", padded))
    if replayed.matrix[:n] != top or replayed.matrix[n:] != A.matrix[n:]:
        raise BlockError("certificate replay mismatch")
    cert = ReductionCertificate(A, [("left_gl", S), ("left_unipotent", padded)],
                                padded, replayed.matrix, q_matrix=Q)
    cert.plain_matrix = whole.matrix
    cert.top_mixed = top
    cert.tail_rows = [row[:] for row in A.matrix[n:]]
    return cert


# -- hyperbolic frames ---------------------------------------------------------


class HyperbolicFrame:
    """A decomposition Q = P + H^g: g hyperbolic pairs plus the orthogonal
    complement P, with coordinate maps in both directions."""

    def __init__(self, Q, pairs, P, P_incl):
        self.Q = Q
        self.pairs = list(pairs)
        self.g = len(self.pairs)
        self.P = P
        self.P_incl = P_incl
        ring = Q.ring
        if P.size * ring.size ** (2 * self.g) != Q.size:
            raise BlockError("frame sizes do not multiply up")
        self.eps = Q.param.epsilon
        self.eps_inv = int(ring.inv[self.eps])
        # abstract copy of the hyperbolic part
        self.H_std = hyperbolic(Q.param, self.g) if self.g else None

    @classmethod
    def from_witt(cls, Q, usr=None, cap=1 << 12):
        dec = witt_index(Q, usr=usr, cap=cap)
        return cls(Q, dec.pairs, dec.complement, dec.complement_incl)

    def hyperbolic_coords(self, v):
        """(A_1..A_g, B_1..B_g) with v = p + sum e_l A_l + f_l B_l."""
        ring = self.Q.ring
        As, Bs = [], []
        for e, f in self.pairs:
            Bs.append(self.Q.lam(e, v))
            As.append(int(ring.mul[self.eps_inv, self.Q.lam(f, v)]))
        return As, Bs

    def h_component(self, v):
        As, Bs = self.hyperbolic_coords(v)
        acc = self.Q.module.zero()
        for (e, f), a, b in zip(self.pairs, As, Bs):
            acc = acc + e * a + f * b
        return acc

    def p_component(self, v):
        """The P-part, as an element of P's module."""
        residual = v - self.h_component(v)
        p = self.P_incl.preimage(residual)
        if p is None:
            raise BlockError("element does not split along the frame")
        return p

    def std_from_coords(self, As, Bs):
        H = self.H_std
        blocks = []
        for a, b in zip(As, Bs):
            blocks.extend([a, b])
        return H.module.element(blocks)

    def embed_std(self, z):
        """Element of the abstract H^g into Q along the frame pairs."""
        blocks = z.ring_blocks()
        acc = self.Q.module.zero()
        for l, (e, f) in enumerate(self.pairs):
            acc = acc + e * blocks[2 * l] + f * blocks[2 * l + 1]
        return acc

    def project_std(self, v):
        As, Bs = self.hyperbolic_coords(v)
        return self.std_from_coords(As, Bs)

    def extend_h_unitary(self, psi_std):
        """1_P + psi: extend a unitary of the abstract H^g to Q."""
        Q = self.Q
        imgs = []
        for gidx in range(Q.module.ngens):
            gme = Q.module.gen(gidx)
            p = self.p_component(gme)
            z = self.project_std(gme)
            imgs.append(self.P_incl(p) + self.embed_std(psi_std(z)))
        f = ModuleMap(Q.module, Q.module, imgs, check=False)
        return UnitaryMap(Q, f, check=True,
                          tag=("map", tuple(x.vec for x in imgs)))


def frame_for(Q, usr=None, cap=1 << 12):
    """Prefer the tracked hyperbolic pairs (full standard H^g) when they
    account for the whole module; otherwise decompose via the Witt search."""
    if Q.hyperbolic_pairs and \
            Q.ring.size ** (2 * len(Q.hyperbolic_pairs)) == Q.size:
        from wittlab.quadratic import zero_quadratic

        P = zero_quadratic(Q.param)
        incl = ModuleMap(P.module, Q.module, [], check=False)
        return HyperbolicFrame(Q, Q.hyperbolic_pairs, P, incl)
    return HyperbolicFrame.from_witt(Q, usr=usr, cap=cap)


# -- hyperbolic straightening -------------------------------------------------


def sequence_block(frame, seq):
    """The associated block of a sequence over the frame: 2g ring rows
    (e-coefficients first, then f-coefficients) and functionals
    lambda(-, p_i) on P."""
    Q = frame.Q
    P = frame.P
    k = len(seq)
    As = []
    Bs = []
    ps = []
    for v in seq:
        a, b = frame.hyperbolic_coords(v)
        As.append(a)
        Bs.append(b)
        ps.append(frame.p_component(v))
    matrix = [[As[i][l] for i in range(k)] for l in range(frame.g)]
    matrix += [[Bs[i][l] for i in range(k)] for l in range(frame.g)]
    funcs = []
    for i in range(k):
        values = [P.lam(P.module.gen(j), ps[i]) for j in range(P.module.ngens)]
        funcs.append(AntiFunctional(P.module, values, check=False))
    return Block(P.module, matrix, funcs), ps


def _dual_completion(H_std, zs, usr, cap, sweep=300, budget=1 << 22):
    """A hyperbolic summand U containing the z's, its pairs, and the pairs of
    the complement: the searched substitute for the hyperbolic-basis step.

    Strategy: dual witnesses first; then a seeded sweep of alternate duals
    (offsets from the witness kernel); finally an elementary-unitary orbit
    word moving the z's into H^k, whose inverse pulls the standard pairs
    back to an envelope.  Every output is verified by the caller.
    """
    import random

    k = len(zs)
    ring = H_std.ring
    base = is_lambda_unimodular(H_std, zs)
    if base is None:
        raise BlockError("projections are not lambda-unimodular")

    def try_duals(ys):
        gens = list(zs) + list(ys)
        U, incl = sub_quadratic(H_std, gens)
        if U.size != ring.size ** (2 * k):
            return None
        dec = witt_index(U, usr=usr, cap=cap)
        if dec.g != k:
            return None
        u_pairs = [(incl(x), incl(y)) for x, y in dec.pairs]
        V, vincl = orthogonal_complement(H_std, [incl(g) for g in U.module.gens()])
        if V.size * U.size != H_std.size:
            return None
        vdec = witt_index(V, usr=usr, cap=cap)
        if vdec.g != frame_g(H_std) - k:
            return None
        if V.size != ring.size ** (2 * vdec.g):
            return None
        v_pairs = [(vincl(x), vincl(y)) for x, y in vdec.pairs]
        return u_pairs, v_pairs

    got = try_duals(base)
    if got is not None:
        return got
    # seeded sweep of alternate dual tuples: offsets from the witness kernel
    m = ring.base_mod
    module = H_std.module
    rows = []
    for s in range(module.nd):
        unit = [0] * module.nd
        unit[s] = 1
        row = []
        for v in zs:
            row.extend(int(x) for x in ring.to_base[H_std.lam_vec(unit, v.vec)])
        rows.append(row)
    solver = LinearSolver(rows, m, width=len(rows[0]) if rows else 0)
    kernel = LinearSolver(solver.kernel_rows(), m, width=module.nd)
    krows = kernel.H
    rng = random.Random(hash(tuple(z.vec for z in zs)) & 0xFFFFFFFF)

    def random_kernel_elem():
        vec = [0] * module.nd
        for row in krows:
            c = rng.randrange(m)
            if c:
                for idx in range(module.nd):
                    vec[idx] = (vec[idx] + c * row[idx]) % m
        return module.from_vec(vec)

    for _ in range(sweep):
        ys = [w + random_kernel_elem() for w in base]
        got = try_duals(ys)
        if got is not None:
            return got
    # elementary-orbit pull-back: move the z's into H^k, pull pairs back
    word = _eu_reach_span(H_std, zs, k, budget=budget)
    rho = identity_unitary(H_std)
    for t in word:
        rho = t.compose(rho)
    rho_inv = rho.inverse()
    pairs = [(rho_inv(module.gen(2 * l)), rho_inv(module.gen(2 * l + 1)))
             for l in range(frame_g(H_std))]
    return pairs[:k], pairs[k:]


def _eu_reach_span(H_std, zs, k, budget):
    """BFS word of elementary unitary generators carrying the whole tuple
    into the span of the first k hyperbolic pairs."""
    from wittlab.stable_range import elementary_unitary_generators

    ring = H_std.ring
    g = frame_g(H_std)

    def in_span(xs):
        for x in xs:
            if any(b != ring.zero for b in x.ring_blocks()[2 * k:]):
                return False
        return True

    if in_span(zs):
        return []

    def bfs(gens):
        start = tuple(x.vec for x in zs)
        parents = {start: None}
        frontier = [list(zs)]
        visits = 0
        while frontier:
            nxt = []
            for xs in frontier:
                for idx, t in enumerate(gens):
                    visits += 1
                    if visits > budget:
                        raise BlockError("EU span-reach budget exhausted")
                    ys = [t(x) for x in xs]
                    key = tuple(y.vec for y in ys)
                    if key in parents:
                        continue
                    parents[key] = (tuple(x.vec for x in xs), idx)
                    if in_span(ys):
                        word = []
                        cur = key
                        while parents[cur] is not None:
                            prev, gidx = parents[cur]
                            word.append(gens[gidx])
                            cur = prev
                        word.reverse()
                        return word
                    nxt.append(ys)
            frontier = nxt
        return None

    _, gens = elementary_unitary_generators(ring, H_std.param, g,
                                            u_mode="basis", H=H_std)
    word = bfs(gens)
    if word is None:
        _, gens_all = elementary_unitary_generators(ring, H_std.param, g,
                                                    u_mode="all", H=H_std)
        word = bfs(gens_all)
    if word is None:
        raise BlockError("no elementary word reaches the hyperbolic span")
    return word


def frame_g(H_std):
    return len(H_std.hyperbolic_pairs)


def hyperbolic_straighten(Q, seq, k=None, frame=None, usr=1, sr=None,
                          cap=1 << 12):
    """phi in U(P + H^g) with phi(seq) inside P + H^k and lambda-unimodular
    projection to H^k.  Needs g >= usr + k and a lambda-unimodular sequence.

    Pipeline: associated block, keep-tail reduction giving p-tilde, the
    transvection composition, then rectification of the enveloping
    hyperbolic basis (searched, verified).  Both post-conditions are
    re-verified before returning.
    """
    seq = list(seq)
    if k is None:
        k = len(seq)
    if k != len(seq):
        raise BlockError("k must equal the sequence length")
    if frame is None:
        frame = frame_for(Q, usr=usr, cap=cap)
    g = frame.g
    if g < usr + k:
        raise BlockError("needs g >= usr + k")
    if sr is None:
        sr = usr  # usr >= sr always; a valid (weaker) bound
    if is_lambda_unimodular(Q, seq) is None:
        raise BlockError("sequence is not lambda-unimodular")
    ring = Q.ring
    param = Q.param

    A_seq, ps = sequence_block(frame, seq)
    if is_unimodular_block(A_seq) is None:
        raise BlockError("associated block is not unimodular (internal)")
    if frame.P.module.ngens == 0:
        p_tilde = [frame.P.module.zero()] * g
        phi1 = identity_unitary(Q)
    else:
        cert = reduce_keep_tail(A_seq, g, g, sr)
        p_tilde = cert.m_column[:g]
        # transvection composition tau(e_g, -eps_bar p_g, ...) ... tau(e_1, ...)
        phi1 = identity_unitary(Q)
        for l in range(g):
            if p_tilde[l].is_zero():
                continue
            e_l = frame.pairs[l][0]
            u = frame.P_incl(p_tilde[l]) * int(ring.neg[param.eps_bar])
            y = Q.mu_rep(u)
            t = transvection(Q, e_l, u, y)
            phi1 = t.compose(phi1)
    moved = [phi1(v) for v in seq]
    zs = [frame.project_std(v) for v in moved]
    if is_lambda_unimodular(frame.H_std, zs) is None:
        raise BlockError("hyperbolic projections failed to become "
                         "lambda-unimodular (internal)")
    # rectify: hyperbolic envelope of the projections
    u_pairs, v_pairs = _dual_completion(frame.H_std, zs, usr, cap)
    all_pairs = list(u_pairs) + list(v_pairs)
    imgs = []
    for x, y in all_pairs:
        imgs.extend([x, y])
    F = ModuleMap(frame.H_std.module, frame.H_std.module, imgs, check=False)
    psi_std = UnitaryMap(frame.H_std, F, check=True).inverse()
    phi = frame.extend_h_unitary(psi_std).compose(phi1)
    # post-conditions, re-verified independently
    out = [phi(v) for v in seq]
    for w in out:
        As, Bs = frame.hyperbolic_coords(w)
        if any(a != ring.zero for a in As[k:]) or \
                any(b != ring.zero for b in Bs[k:]):
            raise BlockError("image escaped P + H^k")
    proj = [frame.project_std(w) for w in out]
    if is_lambda_unimodular(frame.H_std, proj) is None:
        raise BlockError("projection to H^k is not lambda-unimodular")
    return phi


def transitive_move(Q, v, r, frame=None, usr=1, sr=None, cap=1 << 12,
                    budget=1 << 22):
    """phi in U(M) with phi(v) = e_1 + f_1 r, for lambda-unimodular v with
    mu(v) = r + Lambda; needs witt index >= usr + 1."""
    ring = Q.ring
    param = Q.param
    if frame is None:
        frame = frame_for(Q, usr=usr, cap=cap)
    if frame.g < usr + 1:
        raise BlockError("needs witt index >= usr + 1")
    if param.coset_rep(int(r)) != Q.mu_rep(v):
        raise BlockError("r does not represent mu(v)")
    phi1 = hyperbolic_straighten(Q, [v], 1, frame=frame, usr=usr, sr=sr,
                                 cap=cap)
    w1 = phi1(v)
    z = frame.project_std(w1)
    # EU-orbit step on the hyperbolic part: move z to e_1 + f_1 * b
    word = _eu_reach_first_pair(frame.H_std, z, budget=budget)
    rho = identity_unitary(frame.H_std)
    for t in word:
        rho = t.compose(rho)
    phi2 = frame.extend_h_unitary(rho).compose(phi1)
    w2 = phi2(v)
    p = frame.p_component(w2)
    e1, f1 = frame.pairs[0]
    # tau(f_1, -p eps_bar, x): clears the P-part
    if not p.is_zero():
        u = frame.P_incl(p) * int(ring.neg[param.eps_bar])
        t3 = transvection(Q, f1, u, Q.mu_rep(u))
        phi3 = t3.compose(phi2)
    else:
        phi3 = phi2
    w3 = phi3(v)
    As, Bs = frame.hyperbolic_coords(w3)
    if As[0] != ring.one or any(a != ring.zero for a in As[1:]) or \
            any(b != ring.zero for b in Bs[1:]) or not frame.p_component(w3).is_zero():
        raise BlockError("normal form e_1 + f_1 b not reached (internal)")
    b = Bs[0]
    diff = ring.sub(b, int(r))
    if diff != ring.zero:
        if diff not in param.lam:
            raise BlockError("mu mismatch: b - r escaped Lambda (internal)")
        t4 = transvection(Q, f1, Q.module.zero(), diff)
        # tau(f_1, 0, b-r) sends e_1 + f_1 b to e_1 + f_1 r
        phi4 = t4.compose(phi3)
    else:
        phi4 = phi3
    target = e1 + f1 * int(r)
    if phi4(v) != target:
        raise BlockError("transitive move failed to reach e_1 + f_1 r")
    return phi4, target


def _eu_reach_first_pair(H_std, z, budget):
    """BFS word of elementary unitary generators carrying z into
    {e_1 + f_1 s}; raises when the budget exhausts."""
    from wittlab.stable_range import elementary_unitary_generators

    ring = H_std.ring
    g = frame_g(H_std)
    module = H_std.module

    def is_target(x):
        blocks = x.ring_blocks()
        return blocks[0] == ring.one and \
            all(b == ring.zero for b in blocks[2:])

    if is_target(z):
        return []

    def bfs(gens):
        parents = {z.vec: None}
        frontier = [z]
        visits = 0
        while frontier:
            nxt = []
            for x in frontier:
                for idx, t in enumerate(gens):
                    visits += 1
                    if visits > budget:
                        raise BlockError("EU reach budget exhausted")
                    y = t(x)
                    if y.vec in parents:
                        continue
                    parents[y.vec] = (x.vec, idx)
                    if is_target(y):
                        word = []
                        cur = y.vec
                        while parents[cur] is not None:
                            prev, gidx = parents[cur]
                            word.append(gens[gidx])
                            cur = prev
                        word.reverse()  # application order: seed -> target
                        return word
                    nxt.append(y)
            frontier = nxt
        return None

    _, gens = elementary_unitary_generators(ring, H_std.param, g,
                                            u_mode="basis", H=H_std)
    word = bfs(gens)
    if word is None:
        _, gens_all = elementary_unitary_generators(ring, H_std.param, g,
                                                    u_mode="all", H=H_std)
        word = bfs(gens_all)
    if word is None:
        raise BlockError("EU orbit does not reach the first hyperbolic pair")
    return word


# -- cancellation --------------------------------------------------------------


def is_isometry(Q1, Q2, f):
    """Does the module map f: Q1 -> Q2 preserve lambda and mu (bijectively)?"""
    if f.domain is not Q1.module or f.codomain is not Q2.module:
        return False
    if not f.well_defined():
        return False
    imgs = [f(g) for g in Q1.module.gens()]
    for i in range(Q1.module.ngens):
        if Q2.mu_rep(imgs[i]) != Q1.mu[i]:
            return False
        for j in range(Q1.module.ngens):
            if Q2.lam(imgs[i], imgs[j]) != Q1.gram[i][j]:
                return False
    return f.is_bijective()


def cancel_H(Qm, Qn, iso, sums=None, usr=1, sr=None, cap=1 << 12,
             budget=1 << 22):
    """From an isometry M + H = N + H with g(M) >= usr, produce an explicit
    isometry M = N: move the image of the appended hyperbolic pair onto the
    standard one by a transitive move plus two transvections, then restrict.
    """
    param = Qm.param
    ring = Qm.ring
    if sums is None:
        H1 = hyperbolic(param, 1)
        MH, _, _ = direct_sum_quadratic(Qm, H1)
        NH, _, _ = direct_sum_quadratic(Qn, H1)
    else:
        MH, NH = sums
    d2 = 2 * ring.base_dim
    if MH.module.nd != Qm.module.nd + d2 or NH.module.nd != Qn.module.nd + d2:
        raise BlockError("sums must be M + H and N + H with H appended last")

    def lift_m(xx):
        return MH.module.from_vec(list(xx.vec) + [0] * d2)

    def lift_n(xx):
        return NH.module.from_vec(list(xx.vec) + [0] * d2)

    if not is_isometry(MH, NH, iso):
        raise BlockError("the given map is not an isometry of the sums")
    e_m, f_m = MH.hyperbolic_pairs[-1]
    e_n, f_n = NH.hyperbolic_pairs[-1]
    x = iso(e_m)
    y = iso(f_m)
    # frame for N + H with the appended pair first
    dec_n = witt_index(Qn, usr=usr, cap=cap)
    if dec_n.g < usr:
        raise BlockError("needs g(N) >= usr for the pipeline")
    pairs = [(e_n, f_n)] + [(lift_n(a), lift_n(b)) for a, b in dec_n.pairs]
    P = dec_n.complement
    P_incl = ModuleMap(P.module, NH.module,
                       [lift_n(dec_n.complement_incl(g)) for g in P.module.gens()],
                       check=False)
    frame = HyperbolicFrame(NH, pairs, P, P_incl)
    phi_a, target = transitive_move(NH, x, ring.zero, frame=frame, usr=usr,
                                    sr=sr, cap=cap, budget=budget)
    assert target == e_n
    y1 = phi_a(y)
    if NH.lam(e_n, y1) != ring.one:
        raise BlockError("pairing broke during the move (internal)")
    As, Bs = frame.hyperbolic_coords(y1)
    a = As[0]
    w = y1 - e_n * a - f_n
    alpha = phi_a
    if not w.is_zero():
        t_b = transvection(NH, e_n, -w, NH.mu_rep(w))
        alpha = t_b.compose(alpha)
        y2 = t_b(y1)
    else:
        y2 = y1
    As2, Bs2 = frame.hyperbolic_coords(y2)
    c = As2[0]
    if any(v != ring.zero for v in As2[1:]) or Bs2[0] != ring.one or \
            any(v != ring.zero for v in Bs2[1:]) or \
            not frame.p_component(y2).is_zero():
        raise BlockError("transvection failed to reach e c + f (internal)")
    if c != ring.zero:
        xc = int(ring.mul[param.epsilon, c])
        if param.coset_rep(xc) != param.coset_rep(ring.zero):
            raise BlockError("eps*c escaped Lambda (internal)")
        t_c = transvection(NH, e_n, NH.module.zero(), xc)
        alpha = t_c.compose(alpha)
    gamma = alpha.f.compose(iso)
    if gamma(e_m) != e_n or gamma(f_m) != f_n:
        raise BlockError("appended pair not standardized (internal)")
    # restrict to the orthogonal complements: M = N
    imgs = []
    nh_h_offset = Qn.module.nd
    for gidx in range(Qm.module.ngens):
        im = gamma(lift_m(Qm.module.gen(gidx)))
        vec = list(im.vec)
        if any(vec[nh_h_offset:]):
            raise BlockError("restriction escaped N (internal)")
        imgs.append(Qn.module.from_vec(vec[:nh_h_offset]))
    beta = ModuleMap(Qm.module, Qn.module, imgs)
    if not is_isometry(Qm, Qn, beta):
        raise BlockError("restricted map failed the isometry check")
    return beta
