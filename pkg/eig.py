"""
Eigenvalues of dense real matrices and the spectral abscissa of M_sigma.

Householder reduction to upper Hessenberg form followed by the implicitly
shifted Francis double-shift QR iteration (eigenvalues only). This is the
ground truth the polynomial-root side is checked against, so it uses no
characteristic-polynomial machinery.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from errors import NoConvergence
from matcore import MatrixLike, as_array, inf_norm, sigma_array

logger = logging.getLogger(__name__)

ULP = float(np.finfo(float).eps)
SAFMIN = float(np.finfo(float).tiny)
SWEEPS_PER_EIGENVALUE = 30
# Eigenvalues this close to the abscissa count as leading
TIE_TOL = 1e-9
IM_TOL_FACTOR = 1e-7


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues, the spectral abscissa and the eigenvalues attaining it"""
    eigenvalues: Tuple[complex, ...]
    abscissa: float
    leading: Tuple[complex, ...]
    real_crossing: bool
    im_tol: float

    @property
    def leading_is_mixed(self) -> bool:
        """Leading set holds both a real eigenvalue and a complex pair"""
        real = [abs(z.imag) <= self.im_tol for z in self.leading]
        return any(real) and not all(real)


def _balance(a: np.ndarray) -> np.ndarray:
    """Parlett-Reinsch balancing by powers of two (an exact similarity)"""
    b = np.array(a, dtype=float, copy=True)
    n = b.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(b[:, i]))) - abs(b[i, i])
            r = float(np.sum(np.abs(b[i, :]))) - abs(b[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                b[i, :] /= f
                b[:, i] *= f
    return b


def _hessenberg(a: np.ndarray) -> np.ndarray:
    h = np.array(a, dtype=float, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        v = h[k + 1:, k].copy()
        alpha = float(np.linalg.norm(v))
        if alpha == 0.0:
            continue
        if v[0] > 0.0:
            alpha = -alpha
        v[0] -= alpha
        vv = float(v @ v)
        if vv == 0.0:
            continue
        beta = 2.0 / vv
        h[k + 1:, k:] -= beta * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= beta * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _negligible(a: List[List[float]], l: int, anorm: float, smlnum: float) -> bool:
    # Ahues-Tisseur deflation test as in LAPACK's dlahqr
    h = abs(a[l][l - 1])
    if h <= smlnum:
        return True
    tst = abs(a[l - 1][l - 1]) + abs(a[l][l])
    if tst == 0.0:
        tst = anorm
    if h > ULP * tst:
        return False
    ab = max(h, abs(a[l - 1][l]))
    ba = min(h, abs(a[l - 1][l]))
    aa = max(abs(a[l][l]), abs(a[l - 1][l - 1] - a[l][l]))
    bb = min(abs(a[l][l]), abs(a[l - 1][l - 1] - a[l][l]))
    s = aa + ab
    return ba * (ab / s) <= max(smlnum, ULP * (bb * (aa / s)))


def _francis_qr(a: List[List[float]]) -> Tuple[List[float], List[float]]:
    """Eigenvalues of an upper Hessenberg matrix (modified in place)"""
    n = len(a)
    budget = SWEEPS_PER_EIGENVALUE * n
    smlnum = SAFMIN * (n / ULP)
    wr = [0.0] * n
    wi = [0.0] * n
    anorm = sum(abs(a[i][j]) for i in range(n) for j in range(max(i - 1, 0), n))
    nn = n - 1
    t = 0.0
    sweeps = 0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                if _negligible(a, l, anorm, smlnum):
                    a[l][l - 1] = 0.0
                    break
                l -= 1
            x = a[nn][nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1][nn - 1]
            w = a[nn][nn - 1] * a[nn - 1][nn]
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
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if sweeps >= budget:
                raise NoConvergence(f"QR iteration exhausted {budget} sweeps", max_iters=budget)
            if its == 10 or its == 20:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i][i] -= x
                s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            sweeps += 1

            # two consecutive small subdiagonal elements
            m = nn - 2
            while m >= l:
                z = a[m][m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                q = a[m + 1][m + 1] - z - r - s
                r = a[m + 2][m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i][i - 2] = 0.0
                if i != m + 2:
                    a[i][i - 3] = 0.0

            # double-shift QR step on rows l..nn, columns m..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k][k - 1]
                    q = a[k + 1][k - 1]
                    r = a[k + 2][k - 1] if k != nn - 1 else 0.0
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
                        a[k][k - 1] = -a[k][k - 1]
                else:
                    a[k][k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                row_k, row_k1 = a[k], a[k + 1]
                row_k2 = a[k + 2] if k != nn - 1 else None
                for j in range(k, nn + 1):
                    p = row_k[j] + q * row_k1[j]
                    if row_k2 is not None:
                        p += r * row_k2[j]
                        row_k2[j] -= p * z
                    row_k1[j] -= p * y
                    row_k[j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    row = a[i]
                    p = x * row[k] + y * row[k + 1]
                    if k != nn - 1:
                        p += z * row[k + 2]
                        row[k + 2] -= p * r
                    row[k + 1] -= p * q
                    row[k] -= p
    logger.debug("QR converged in %d sweeps (n=%d)", sweeps, n)
    return wr, wi


def eigenvalues(a: MatrixLike, im_tol: Optional[float] = None, balance: bool = False) -> Spectrum:
    """
    All eigenvalues of a real square matrix.

    Args:
        a: Matrix or square ndarray
        im_tol: |Im| threshold for calling an eigenvalue real;
            defaults to 1e-7 * max(1, ||A||_inf)
        balance: Balance rows and columns first (worth it for companion matrices)

    Returns:
        Spectrum with eigenvalues sorted by (real, imag)

    Raises:
        NoConvergence: If the QR iteration exhausts 30n sweeps
    """
    arr = as_array(a)
    n = arr.shape[0]
    if im_tol is None:
        im_tol = IM_TOL_FACTOR * max(1.0, inf_norm(arr))

    if n == 1:
        wr, wi = [float(arr[0, 0])], [0.0]
    else:
        work = _balance(arr) if balance else arr
        wr, wi = _francis_qr(_hessenberg(work).tolist())

    values = sorted((complex(re, im) for re, im in zip(wr, wi)), key=lambda z: (z.real, z.imag))
    abscissa = max(z.real for z in values)
    leading = tuple(z for z in values if z.real >= abscissa - TIE_TOL)
    real_crossing = any(abs(z.imag) <= im_tol for z in leading)
    return Spectrum(
        eigenvalues=tuple(values),
        abscissa=abscissa,
        leading=leading,
        real_crossing=real_crossing,
        im_tol=im_tol,
    )


def spectral_abscissa(m: MatrixLike, sigma: float) -> float:
    """Largest real part among the eigenvalues of M_sigma"""
    return eigenvalues(sigma_array(m, sigma)).abscissa


def sigma_spectrum(m: MatrixLike, sigma: float) -> Spectrum:
    """Full Spectrum of M_sigma"""
    return eigenvalues(sigma_array(m, sigma))
