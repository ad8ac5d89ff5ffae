"""Exact linear algebra over Z/m on top of the Howell-form kernels.

Everything downstream (unimodularity, splittings, unitary groups, posets)
reduces to row-oriented problems  x * A = b  over Z/m; this module wraps the
kernel calls with caching, solution enumeration and size bookkeeping.
"""

import itertools

from wittlab import kernels


class LinearSolver:
    """Factored row system over Z/m: solve x*A = b, kernel, membership."""

    def __init__(self, rows, m, width=None):
        rows = [list(r) for r in rows]
        self.m = m
        self.nrows = len(rows)
        if rows:
            self.width = len(rows[0])
        else:
            self.width = 0 if width is None else width
        H, pivots, T, K = kernels.howell_aug(rows, m) if rows else ([], [], [], [])
        self.H = H
        self.pivots = pivots
        self.T = T
        self.K = K

    def reduce(self, v):
        """Canonical representative of v modulo the row module, plus coeffs."""
        if not self.H:
            return [x % self.m for x in v], []
        return kernels.reduce_vec(self.H, self.pivots, list(v), self.m)

    def contains(self, v):
        rep, _ = self.reduce(v)
        return not any(rep)

    def solve(self, b):
        """One x with x*A == b mod m, or None."""
        rep, coeffs = self.reduce(b)
        if any(rep):
            return None
        m = self.m
        x = [0] * self.nrows
        for c, trow in zip(coeffs, self.T):
            if c:
                for i, t in enumerate(trow):
                    x[i] = (x[i] + c * t) % m
        return x

    def kernel_rows(self):
        return self.K

    @property
    def module_size(self):
        size = 1
        for i, j in enumerate(self.pivots):
            size *= self.m // self.H[i][j]
        return size

    def enumerate_module(self):
        """All elements of the row module (use only when small)."""
        m = self.m
        if not self.H:
            yield (0,) * self.width
            return
        n = len(self.H[0])
        ranges = [range(m // self.H[i][j]) for i, j in enumerate(self.pivots)]
        for coeffs in itertools.product(*ranges):
            v = [0] * n
            for c, row in zip(coeffs, self.H):
                if c:
                    for k in range(n):
                        v[k] = (v[k] + c * row[k]) % m
            yield tuple(v)

    def enumerate_canonical_reps(self):
        """All canonical representatives modulo the row module."""
        m = self.m
        n = self.width if not self.H else len(self.H[0])
        pivset = {j: self.H[i][j] for i, j in enumerate(self.pivots)}
        ranges = [range(pivset.get(k, m)) for k in range(n)]
        for v in itertools.product(*ranges):
            yield v


def transpose(rows):
    return [list(col) for col in zip(*rows)] if rows else []


def solve_columns(M_rows, b, m):
    """One z with M @ z == b (column orientation), or None."""
    solver = LinearSolver(transpose(M_rows), m)
    return solver.solve(b)


def matvec(M_rows, v, m):
    return [sum(a * x for a, x in zip(row, v)) % m for row in M_rows]


def vecmat(v, M_rows, m):
    if not M_rows:
        return []
    n = len(M_rows[0])
    out = [0] * n
    for c, row in zip(v, M_rows):
        if c:
            for k in range(n):
                out[k] = (out[k] + c * row[k]) % m
    return out
