# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled eigenvalue kernels: balancing, Hessenberg reduction, Francis QR.

Same algorithms and call signatures as ``nceig._eigen_py``.  All loops run
without the GIL on C-contiguous float64 arrays.
"""

from libc.math cimport fabs, sqrt, copysign
from libc.stdlib cimport malloc, free

cdef double EPS = 2.220446049250313e-16
cdef double TINY = 2.2250738585072014e-308
cdef double RADIX = 2.0


def balance(double[:, ::1] a):
    with nogil:
        _balance(a)


cdef void _balance(double[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double sqrdx = RADIX * RADIX, c, r, g, f, s
    cdef bint done = False
    while not done:
        done = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += fabs(a[j, i])
                    r += fabs(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= RADIX
                c *= sqrdx
            g = r * RADIX
            while c > g:
                f /= RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                g = 1.0 / f
                for j in range(n):
                    a[i, j] *= g
                for j in range(n):
                    a[j, i] *= f


def hessenberg(double[:, ::1] a):
    cdef int ok
    with nogil:
        ok = _hessenberg(a)
    if not ok:
        raise MemoryError()


cdef int _hessenberg(double[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], k, i, j, m
    cdef double alpha, vnorm2, beta, acc, vi, scale
    cdef double *v
    cdef double *w
    if n < 3:
        return 1
    v = <double *> malloc(n * sizeof(double))
    w = <double *> malloc(n * sizeof(double))
    if v == NULL or w == NULL:
        free(v)
        free(w)
        return 0
    for k in range(n - 2):
        m = n - k - 1
        scale = 0.0
        for i in range(m):
            if fabs(a[k + 1 + i, k]) > scale:
                scale = fabs(a[k + 1 + i, k])
        if scale == 0.0:
            continue
        # reflector built from x / scale so squares cannot underflow
        acc = 0.0
        for i in range(m):
            v[i] = a[k + 1 + i, k] / scale
            acc += v[i] * v[i]
        alpha = sqrt(acc)
        if v[0] > 0:
            alpha = -alpha
        v[0] -= alpha
        vnorm2 = 0.0
        for i in range(m):
            vnorm2 += v[i] * v[i]
        beta = 2.0 / vnorm2
        alpha *= scale
        # left: w = v^T A[k+1:, k:], accumulated row by row
        for j in range(k, n):
            w[j] = 0.0
        for i in range(m):
            vi = v[i]
            for j in range(k, n):
                w[j] += vi * a[k + 1 + i, j]
        for i in range(m):
            vi = beta * v[i]
            for j in range(k, n):
                a[k + 1 + i, j] -= vi * w[j]
        # right: A[:, k+1:] -= beta * (A[:, k+1:] v) v^T
        for i in range(n):
            acc = 0.0
            for j in range(m):
                acc += a[i, k + 1 + j] * v[j]
            acc *= beta
            for j in range(m):
                a[i, k + 1 + j] -= acc * v[j]
        for i in range(k + 2, n):
            a[i, k] = 0.0
        a[k + 1, k] = alpha
    free(v)
    free(w)
    return 1


def hqr(double[:, ::1] a, double[::1] wr, double[::1] wi, long max_sweeps):
    cdef long status = 0, sweeps = 0, deflations = 0
    with nogil:
        status = _hqr(a, wr, wi, max_sweeps, &sweeps, &deflations)
    return status, sweeps, deflations


cdef long _hqr(double[:, ::1] a, double[::1] wr, double[::1] wi, long max_sweeps,
               long *sweeps_out, long *deflations_out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], nn, m, l, k, j, i, mmin
    cdef long its = 0, sweeps = 0, deflations = 0
    cdef double z = 0, y, x, w, v, u, t, s, r = 0, q = 0, p = 0, anorm = 0.0
    for i in range(n):
        for j in range(i - 1 if i > 0 else 0, n):
            anorm += fabs(a[i, j])
    cdef double smlnum = TINY * (n / EPS)
    nn = n - 1
    t = 0.0
    while nn >= 0:
        l = nn
        while l >= 1:
            s = fabs(a[l - 1, l - 1]) + fabs(a[l, l])
            if s == 0.0:
                s = anorm
            if fabs(a[l, l - 1]) <= EPS * s or fabs(a[l, l - 1]) <= smlnum:
                a[l, l - 1] = 0.0
                break
            l -= 1
        x = a[nn, nn]
        if l == nn:
            wr[nn] = x + t
            wi[nn] = 0.0
            nn -= 1
            its = 0
            deflations += 1
            continue
        y = a[nn - 1, nn - 1]
        w = a[nn, nn - 1] * a[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = sqrt(fabs(q))
            x += t
            if q >= 0.0:
                z = p + copysign(z, p)
                wr[nn - 1] = x + z
                wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = 0.0
                wi[nn] = 0.0
            else:
                wr[nn - 1] = x + p
                wr[nn] = x + p
                wi[nn - 1] = z
                wi[nn] = -z
            nn -= 2
            its = 0
            deflations += 1
            continue
        if sweeps >= max_sweeps:
            sweeps_out[0] = sweeps
            deflations_out[0] = deflations
            return nn + 1
        if its > 0 and its % 10 == 0:
            t += x
            for i in range(nn + 1):
                a[i, i] -= x
            s = fabs(a[nn, nn - 1]) + fabs(a[nn - 1, nn - 2])
            x = 0.75 * s
            y = x
            w = -0.4375 * s * s
        its += 1
        sweeps += 1
        m = nn - 2
        while True:
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = fabs(p) + fabs(q) + fabs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = fabs(a[m, m - 1]) * (fabs(q) + fabs(r))
            v = fabs(p) * (fabs(a[m - 1, m - 1]) + fabs(z) + fabs(a[m + 1, m + 1]))
            if u <= EPS * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            a[i, i - 2] = 0.0
            if i != m + 2:
                a[i, i - 3] = 0.0
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = 0.0
                if k != nn - 1:
                    r = a[k + 2, k - 1]
                x = fabs(p) + fabs(q) + fabs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = copysign(sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    a[k, k - 1] = -a[k, k - 1]
            else:
                a[k, k - 1] = -s * x
            p += s
            x = p / s
            y = q / s
            z = r / s
            q /= p
            r /= p
            if k != nn - 1:
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j] + r * a[k + 2, j]
                    a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
            else:
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
            mmin = nn if nn < k + 3 else k + 3
            if k != nn - 1:
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1] + z * a[i, k + 2]
                    a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
            else:
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    sweeps_out[0] = sweeps
    deflations_out[0] = deflations
    return 0
