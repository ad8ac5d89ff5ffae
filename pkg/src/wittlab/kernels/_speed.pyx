# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled arithmetic kernels: Howell form over Z/m and integer SNF.

Mirrors wittlab.kernels.pure; the dispatcher picks this module when it
imports.  SNF works in 64-bit integers and raises OverflowError when entries
threaten to overflow, at which point the caller retries with the pure
(bignum) implementation.
"""

from libc.stdlib cimport malloc, free

IMPLEMENTATION = "speed"

cdef long long OVERFLOW_LIMIT = (<long long> 1) << 56


cdef inline long long c_gcd(long long a, long long b) nogil:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef void c_xgcd(long long a, long long b, long long* g, long long* s, long long* t) nogil:
    cdef long long x0 = 1, x1 = 0, y0 = 0, y1 = 1, q, tmp
    while b:
        q = a / b
        tmp = a - q * b; a = b; b = tmp
        tmp = x0 - q * x1; x0 = x1; x1 = tmp
        tmp = y0 - q * y1; y0 = y1; y1 = tmp
    if a < 0:
        a = -a; x0 = -x0; y0 = -y0
    g[0] = a; s[0] = x0; t[0] = y0


cdef long long c_modinv(long long a, long long m) nogil:
    cdef long long g, s, t
    if m == 1:
        return 0
    c_xgcd(a % m, m, &g, &s, &t)
    s %= m
    if s < 0:
        s += m
    return s


cdef long long c_stab_unit(long long a, long long m) nogil:
    cdef long long g, a1, m1, u
    a %= m
    if a == 0:
        return 1
    g = c_gcd(a, m)
    a1 = a / g; m1 = m / g
    u = c_modinv(a1, m1) if m1 > 1 else 1
    while c_gcd(u % m, m) != 1:
        u += m1
    return u % m


def howell_aug(A, long long m):
    """Howell form with transform and kernel; see wittlab.kernels.pure."""
    cdef Py_ssize_t r = len(A)
    cdef Py_ssize_t n = len(A[0]) if r else 0
    cdef Py_ssize_t width = n + r
    cdef Py_ssize_t i, j, k, nkeep, npool, idx, idx2
    cdef Py_ssize_t piv_slot, slot, free_top, ann_slot, nonzero
    cdef long long a, b, g, s, t, ag, bg, u, p, q, c, pk, rk
    if r == 0:
        return [], [], [], []

    cdef long long* buf = <long long*> malloc(2 * r * width * sizeof(long long))
    cdef long long* newbuf
    # row pointers: pool entries index into buf slots of length `width`
    cdef Py_ssize_t* pool = <Py_ssize_t*> malloc(2 * r * sizeof(Py_ssize_t))
    cdef Py_ssize_t* keep = <Py_ssize_t*> malloc(2 * r * sizeof(Py_ssize_t))
    cdef Py_ssize_t* hsel = <Py_ssize_t*> malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* newpool
    cdef Py_ssize_t* newkeep
    cdef Py_ssize_t nslots = 2 * r
    if buf == NULL or pool == NULL or keep == NULL or hsel == NULL:
        raise MemoryError()
    cdef Py_ssize_t nh = 0
    cdef list pivots = []
    try:
        for i in range(r):
            row = A[i]
            for k in range(n):
                buf[i * width + k] = (<long long> row[k]) % m
            for k in range(n, width):
                buf[i * width + k] = 0
            buf[i * width + n + i] = 1
            pool[i] = i
        npool = r
        # slots r..2r-1 are spare annihilator slots, recycled as needed
        free_top = r

        for j in range(n):
            nkeep = 0
            piv_slot = -1
            for idx in range(npool):
                slot = pool[idx]
                if buf[slot * width + j] != 0:
                    if piv_slot < 0:
                        piv_slot = slot
                    else:
                        # eliminate entry j of this row against the pivot row
                        a = buf[piv_slot * width + j]
                        b = buf[slot * width + j]
                        g = c_gcd(a, m)
                        if b % g == 0:
                            t = ((b / g) * c_modinv(a / g, m / g)) % m
                            for k in range(j, width):
                                c = (buf[slot * width + k] - t * buf[piv_slot * width + k]) % m
                                buf[slot * width + k] = c + m if c < 0 else c
                        else:
                            c_xgcd(a, b, &g, &s, &t)
                            ag = a / g; bg = b / g
                            for k in range(j, width):
                                pk = buf[piv_slot * width + k]
                                rk = buf[slot * width + k]
                                c = (s * pk + t * rk) % m
                                buf[piv_slot * width + k] = c + m if c < 0 else c
                                c = (ag * rk - bg * pk) % m
                                buf[slot * width + k] = c + m if c < 0 else c
                        keep[nkeep] = slot; nkeep += 1
                else:
                    keep[nkeep] = slot; nkeep += 1
            if piv_slot < 0:
                # column has no pivot; pool unchanged
                continue
            u = c_stab_unit(buf[piv_slot * width + j], m)
            if u != 1:
                for k in range(j, width):
                    buf[piv_slot * width + k] = (buf[piv_slot * width + k] * u) % m
            p = buf[piv_slot * width + j]
            q = m / p
            # annihilator shadow row goes back into the pool if nonzero
            if free_top >= nslots:
                # grow
                newbuf = <long long*> malloc(2 * nslots * width * sizeof(long long))
                if newbuf == NULL:
                    raise MemoryError()
                for k in range(nslots * width):
                    newbuf[k] = buf[k]
                free(buf); buf = newbuf
                newpool = <Py_ssize_t*> malloc(2 * nslots * sizeof(Py_ssize_t))
                newkeep = <Py_ssize_t*> malloc(2 * nslots * sizeof(Py_ssize_t))
                if newpool == NULL or newkeep == NULL:
                    raise MemoryError()
                for k in range(nkeep):
                    newkeep[k] = keep[k]
                for k in range(npool):
                    newpool[k] = pool[k]
                free(pool); free(keep)
                pool = newpool; keep = newkeep
                nslots = 2 * nslots
            ann_slot = free_top
            nonzero = 0
            for k in range(width):
                c = (q * buf[piv_slot * width + k]) % m
                buf[ann_slot * width + k] = c
                if c != 0:
                    nonzero = 1
            if nonzero:
                keep[nkeep] = ann_slot; nkeep += 1
                free_top += 1
            hsel[nh] = piv_slot
            pivots.append(j)
            nh += 1
            for idx in range(nkeep):
                pool[idx] = keep[idx]
            npool = nkeep

        # canonical form: entries above a pivot reduced mod the pivot
        for idx in range(nh):
            j = pivots[idx]
            p = buf[hsel[idx] * width + j]
            for idx2 in range(idx):
                c = buf[hsel[idx2] * width + j] / p
                if c:
                    for k in range(j, width):
                        b = (buf[hsel[idx2] * width + k] - c * buf[hsel[idx] * width + k]) % m
                        buf[hsel[idx2] * width + k] = b + m if b < 0 else b

        H = [[buf[hsel[idx] * width + k] for k in range(n)] for idx in range(nh)]
        T = [[buf[hsel[idx] * width + k] for k in range(n, width)] for idx in range(nh)]
        K = []
        for idx in range(npool):
            slot = pool[idx]
            nonzero = 0
            for k in range(n, width):
                if buf[slot * width + k] != 0:
                    nonzero = 1
                    break
            if nonzero:
                K.append([buf[slot * width + k] for k in range(n, width)])
        return H, pivots, T, K
    finally:
        free(buf); free(pool); free(keep); free(hsel)


def reduce_vec(H, pivots, v, long long m):
    """Greedy Howell reduction; see wittlab.kernels.pure.reduce_vec."""
    cdef Py_ssize_t n = len(v)
    cdef Py_ssize_t h = len(H)
    cdef Py_ssize_t i, j, k
    cdef long long p, c, x
    cdef long long* w = <long long*> malloc(n * sizeof(long long))
    if w == NULL:
        raise MemoryError()
    coeffs = [0] * h
    try:
        for k in range(n):
            w[k] = (<long long> v[k]) % m
        for i in range(h):
            j = pivots[i]
            p = H[i][j]
            c = w[j] / p
            if c:
                coeffs[i] = c
                hi = H[i]
                for k in range(j, n):
                    x = (w[k] - c * (<long long> hi[k])) % m
                    w[k] = x + m if x < 0 else x
        return [w[k] for k in range(n)], coeffs
    finally:
        free(w)


def snf_divisors(A):
    """Nonzero elementary divisors of an integer matrix (64-bit arithmetic).

    Raises OverflowError when intermediate entries grow beyond the safe
    range; callers fall back to the pure big-integer implementation.
    """
    cdef Py_ssize_t nr = len(A)
    cdef Py_ssize_t nc = len(A[0]) if nr else 0
    cdef Py_ssize_t i, j, k, t, bi, bj, offender, dirty
    cdef long long v, a, best, q, d
    if nr == 0 or nc == 0:
        return []
    cdef long long* M = <long long*> malloc(nr * nc * sizeof(long long))
    if M == NULL:
        raise MemoryError()
    divs = []
    try:
        for i in range(nr):
            row = A[i]
            for j in range(nc):
                v = <long long> row[j]
                if v > OVERFLOW_LIMIT or v < -OVERFLOW_LIMIT:
                    raise OverflowError("snf input too large")
                M[i * nc + j] = v
        t = 0
        while t < nr and t < nc:
            best = 0; bi = -1; bj = -1
            for i in range(t, nr):
                for j in range(t, nc):
                    v = M[i * nc + j]
                    if v != 0:
                        a = -v if v < 0 else v
                        if bi < 0 or a < best:
                            best = a; bi = i; bj = j
                            if a == 1:
                                break
                if bi >= 0 and best == 1:
                    break
            if bi < 0:
                break
            if bi != t:
                for k in range(nc):
                    v = M[t * nc + k]; M[t * nc + k] = M[bi * nc + k]; M[bi * nc + k] = v
            if bj != t:
                for i in range(nr):
                    v = M[i * nc + t]; M[i * nc + t] = M[i * nc + bj]; M[i * nc + bj] = v
            while True:
                for i in range(t + 1, nr):
                    while M[i * nc + t]:
                        q = M[i * nc + t] / M[t * nc + t]
                        if q:
                            for k in range(t, nc):
                                v = M[t * nc + k]
                                if (v > OVERFLOW_LIMIT or v < -OVERFLOW_LIMIT or
                                        q > OVERFLOW_LIMIT or q < -OVERFLOW_LIMIT):
                                    raise OverflowError("snf overflow")
                                M[i * nc + k] -= q * v
                                if M[i * nc + k] > OVERFLOW_LIMIT or M[i * nc + k] < -OVERFLOW_LIMIT:
                                    raise OverflowError("snf overflow")
                        if M[i * nc + t]:
                            for k in range(t, nc):
                                v = M[t * nc + k]; M[t * nc + k] = M[i * nc + k]; M[i * nc + k] = v
                for j in range(t + 1, nc):
                    while M[t * nc + j]:
                        q = M[t * nc + j] / M[t * nc + t]
                        if q:
                            for i in range(nr):
                                v = M[i * nc + t]
                                if (v > OVERFLOW_LIMIT or v < -OVERFLOW_LIMIT or
                                        q > OVERFLOW_LIMIT or q < -OVERFLOW_LIMIT):
                                    raise OverflowError("snf overflow")
                                M[i * nc + j] -= q * v
                                if M[i * nc + j] > OVERFLOW_LIMIT or M[i * nc + j] < -OVERFLOW_LIMIT:
                                    raise OverflowError("snf overflow")
                        if M[t * nc + j]:
                            for i in range(nr):
                                v = M[i * nc + t]; M[i * nc + t] = M[i * nc + j]; M[i * nc + j] = v
                dirty = 0
                for i in range(t + 1, nr):
                    if M[i * nc + t]:
                        dirty = 1
                        break
                if dirty:
                    continue
                d = M[t * nc + t]
                offender = -1
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if M[i * nc + j] % d:
                            offender = i
                            break
                    if offender >= 0:
                        break
                if offender < 0:
                    break
                for k in range(t, nc):
                    M[t * nc + k] += M[offender * nc + k]
                    if M[t * nc + k] > OVERFLOW_LIMIT or M[t * nc + k] < -OVERFLOW_LIMIT:
                        raise OverflowError("snf overflow")
            d = M[t * nc + t]
            divs.append(-d if d < 0 else d)
            t += 1
        divs.sort()
        return divs
    finally:
        free(M)
