"""Pure-Python eigenvalue kernels: balancing, Hessenberg reduction, Francis QR.

Reference implementation of the routines in ``_eigen_core.pyx``; used when
the compiled extension is unavailable or when NCEIG_BACKEND=python.
Inner loops are vectorised with numpy where a whole row or column moves.
"""

import math

import numpy as np

EPS = np.finfo(float).eps
TINY = np.finfo(float).tiny
RADIX = 2.0


def balance(a):
    """Scale rows/columns by powers of two to even out their norms, in place."""
    n = a.shape[0]
    sqrdx = RADIX * RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
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
                a[i, :] *= 1.0 / f
                a[:, i] *= f


def hessenberg(a):
    """Reduce ``a`` to upper Hessenberg form by Householder similarity, in place."""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        scale = float(np.abs(x).max())
        if scale == 0.0:
            continue
        # reflector built from x / scale so squares cannot underflow
        v = x / scale
        alpha = math.sqrt(float(np.dot(v, v)))
        if v[0] > 0:
            alpha = -alpha
        v[0] -= alpha
        beta = 2.0 / float(np.dot(v, v))
        alpha *= scale
        # left: rows k+1.. , columns k..
        w = v @ a[k + 1:, k:]
        a[k + 1:, k:] -= beta * np.outer(v, w)
        # right: all rows, columns k+1..
        w = a[:, k + 1:] @ v
        a[:, k + 1:] -= beta * np.outer(w, v)
        a[k + 2:, k] = 0.0
        a[k + 1, k] = alpha


def hqr(a, wr, wi, max_sweeps):
    """Eigenvalues of the upper Hessenberg matrix ``a`` (destroyed).

    Returns ``(status, sweeps, deflations)``; status is 0 on success, else the
    number of eigenvalues still unconverged.
    """
    n = a.shape[0]
    anorm = 0.0
    for i in range(n):
        anorm += float(np.abs(a[i, max(i - 1, 0):]).sum())
    smlnum = TINY * (n / EPS)
    nn = n - 1
    t = 0.0
    sweeps = 0
    deflations = 0
    its = 0
    while nn >= 0:
        # search for a negligible subdiagonal element
        l = nn
        while l >= 1:
            s = abs(a[l - 1, l - 1]) + abs(a[l, l])
            if s == 0.0:
                s = anorm
            if abs(a[l, l - 1]) <= max(EPS * s, smlnum):
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
            z = math.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + math.copysign(z, p)
                wr[nn - 1] = wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = wi[nn] = 0.0
            else:
                wr[nn - 1] = wr[nn] = x + p
                wi[nn - 1] = z
                wi[nn] = -z
            nn -= 2
            its = 0
            deflations += 1
            continue
        if sweeps >= max_sweeps:
            return nn + 1, sweeps, deflations
        if its > 0 and its % 10 == 0:
            # exceptional shift
            t += x
            for i in range(nn + 1):
                a[i, i] -= x
            s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
            x = y = 0.75 * s
            w = -0.4375 * s * s
        its += 1
        sweeps += 1
        # look for two consecutive small subdiagonal elements
        m = nn - 2
        while True:
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
            if u <= EPS * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            a[i, i - 2] = 0.0
            if i != m + 2:
                a[i, i - 3] = 0.0
        # double-shift QR sweep on rows l..nn, columns m..nn
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
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
            mmin = min(nn, k + 3)
            if k != nn - 1:
                rows = a[k:k + 3, k:nn + 1]
                pr = rows[0] + q * rows[1] + r * rows[2]
                rows[2] -= pr * z
                rows[1] -= pr * y
                rows[0] -= pr * x
                cols = a[l:mmin + 1, k:k + 3]
                pc = x * cols[:, 0] + y * cols[:, 1] + z * cols[:, 2]
                cols[:, 2] -= pc * r
                cols[:, 1] -= pc * q
                cols[:, 0] -= pc
            else:
                rows = a[k:k + 2, k:nn + 1]
                pr = rows[0] + q * rows[1]
                rows[1] -= pr * y
                rows[0] -= pr * x
                cols = a[l:mmin + 1, k:k + 2]
                pc = x * cols[:, 0] + y * cols[:, 1]
                cols[:, 1] -= pc * q
                cols[:, 0] -= pc
    return 0, sweeps, deflations
