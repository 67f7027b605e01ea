"""Numba implementations of the per-step kernels.

Loop bodies replicate the numpy backend's expression order exactly so the
produced fields are bit-identical; see backends.__init__ for the contract.
All loops are serial and row-major, which keeps reruns bit-reproducible.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _explicit_update(f, ft, dt):
    n0, n1, L = f.shape
    f_new = np.empty_like(f)
    min_nrm2 = np.inf
    max_ft2 = 0.0
    for i in range(n0):
        for j in range(n1):
            nrm2 = 0.0
            ft2 = 0.0
            for c in range(L):
                fnc = f[i, j, c] + dt * ft[i, j, c]
                nrm2 += fnc * fnc
                ft2 += ft[i, j, c] * ft[i, j, c]
            if nrm2 < min_nrm2:
                min_nrm2 = nrm2
            if ft2 > max_ft2:
                max_ft2 = ft2
            nrm = np.sqrt(nrm2)
            for c in range(L):
                fnc = f[i, j, c] + dt * ft[i, j, c]
                f_new[i, j, c] = fnc / nrm
    return f_new, np.sqrt(min_nrm2), dt * np.sqrt(max_ft2)


def explicit_update(f, ft, dt):
    f_new, min_norm, max_disp = _explicit_update(f, ft, dt)
    return f_new, float(min_norm), float(max_disp)


@njit(cache=True)
def _pow1(x, e):
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 3.0:
        return x * x * x
    return x ** e


@njit(cache=True)
def _post_step(f, v, decay, q, h2inv, half_h2inv, inv2h, h2, e_arr, pe_half,
               ft_in, use_ft_in):
    n0, n1, L = f.shape
    P = e_arr.shape[0]
    v_new = np.empty_like(v)
    ft = np.empty_like(f)
    dc_out = np.empty_like(v)
    ft2_out = np.empty_like(v)
    scalars = np.zeros(3 + 2 * P)
    vmin = np.inf
    flux_tot = 0.0
    dfp_tot = 0.0
    m_tot = np.zeros(P)
    d2f_tot = np.zeros(P)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        im = i - 1 if i >= 1 else n0 - 1
        row_flux = 0.0
        row_dfp = 0.0
        row_m = np.zeros(P)
        row_d2f = np.zeros(P)
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j >= 1 else n1 - 1
            se = 0.0
            sw = 0.0
            sn = 0.0
            ss = 0.0
            sx = 0.0
            sy = 0.0
            for c in range(L):
                fc = f[i, j, c]
                fE = f[ip, j, c]
                fW = f[im, j, c]
                fN = f[i, jp, c]
                fS = f[i, jm, c]
                dE = fE - fc
                dW = fW - fc
                dN = fN - fc
                dS = fS - fc
                se += dE * dE
                sw += dW * dW
                sn += dN * dN
                ss += dS * dS
                gx = (fE - fW) * inv2h
                gy = (fN - fS) * inv2h
                sx += gx * gx
                sy += gy * gy
            dnb = ((se + sw) + (sn + ss)) * half_h2inv
            dc = sx + sy
            vn = decay * v[i, j] + q * dc
            ft2 = 0.0
            for c in range(L):
                fc = f[i, j, c]
                fE = f[ip, j, c]
                fW = f[im, j, c]
                fN = f[i, jp, c]
                fS = f[i, jm, c]
                lc = ((fE + fW) + (fN + fS) - 4.0 * fc) * h2inv
                if use_ft_in:
                    ftc = ft_in[i, j, c]
                else:
                    tau_c = lc + dnb * fc
                    ftc = tau_c / vn
                ft[i, j, c] = ftc
                ft2 += ftc * ftc
            v_new[i, j] = vn
            dc_out[i, j] = dc
            ft2_out[i, j] = ft2
            if vn < vmin:
                vmin = vn
            row_flux += vn * ft2
            row_dfp += _pow1(dc, pe_half)
            for k in range(P):
                ftp = _pow1(ft2, e_arr[k])
                row_m[k] += vn * ftp
                row_d2f[k] += dc * ftp
        flux_tot += row_flux
        dfp_tot += row_dfp
        for k in range(P):
            m_tot[k] += row_m[k]
            d2f_tot[k] += row_d2f[k]
    scalars[0] = flux_tot * h2
    scalars[1] = vmin
    scalars[2] = dfp_tot * h2
    for k in range(P):
        scalars[3 + k] = m_tot[k] * h2
        scalars[3 + P + k] = d2f_tot[k] * h2
    return v_new, ft, dc_out, ft2_out, scalars


def post_step(f, v, decay, q, h2inv, half_h2inv, inv2h, h2, e_arr, pe_half,
              ft_in=None):
    use = ft_in is not None
    ft_arg = ft_in if use else f
    return _post_step(f, v, decay, q, h2inv, half_h2inv, inv2h, h2, e_arr,
                      pe_half, ft_arg, use)


@njit(cache=True)
def _grad_moment_sums(ft, ft2, inv2h, h2, p_half_arr):
    n0, n1, L = ft.shape
    P = p_half_arr.shape[0]
    out = np.zeros(P)
    row = np.zeros(P)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        im = i - 1 if i >= 1 else n0 - 1
        for k in range(P):
            row[k] = 0.0
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j >= 1 else n1 - 1
            sx = 0.0
            sy = 0.0
            for c in range(L):
                gx = (ft[ip, j, c] - ft[im, j, c]) * inv2h
                gy = (ft[i, jp, c] - ft[i, jm, c]) * inv2h
                sx += gx * gx
                sy += gy * gy
            g2 = sx + sy
            for k in range(P):
                ph = p_half_arr[k]
                if ph == 0.0:
                    row[k] += g2
                else:
                    row[k] += g2 * _pow1(ft2[i, j], ph)
        for k in range(P):
            out[k] += row[k]
    for k in range(P):
        out[k] = out[k] * h2
    return out


def grad_moment_sums(ft, ft2, inv2h, h2, p_half_arr):
    return _grad_moment_sums(ft, ft2, inv2h, h2, p_half_arr)


@njit(cache=True)
def _neighbor_density(f, half_h2inv):
    n0, n1, L = f.shape
    out = np.empty((n0, n1))
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        im = i - 1 if i >= 1 else n0 - 1
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j >= 1 else n1 - 1
            se = 0.0
            sw = 0.0
            sn = 0.0
            ss = 0.0
            for c in range(L):
                fc = f[i, j, c]
                dE = f[ip, j, c] - fc
                dW = f[im, j, c] - fc
                dN = f[i, jp, c] - fc
                dS = f[i, jm, c] - fc
                se += dE * dE
                sw += dW * dW
                sn += dN * dN
                ss += dS * dS
            out[i, j] = ((se + sw) + (sn + ss)) * half_h2inv
    return out


def neighbor_density(f, half_h2inv):
    return _neighbor_density(f, half_h2inv)


@njit(cache=True)
def _matvec_helmholtz(x, v, dth2):
    n0, n1, L = x.shape
    y = np.empty_like(x)
    for i in range(n0):
        ip = i + 1 if i + 1 < n0 else 0
        im = i - 1 if i >= 1 else n0 - 1
        for j in range(n1):
            jp = j + 1 if j + 1 < n1 else 0
            jm = j - 1 if j >= 1 else n1 - 1
            for c in range(L):
                xc = x[i, j, c]
                lap_scaled = ((x[ip, j, c] + x[im, j, c])
                              + (x[i, jp, c] + x[i, jm, c]) - 4.0 * xc) * dth2
                y[i, j, c] = v[i, j] * xc - lap_scaled
    return y


def matvec_helmholtz(x, v, dth2):
    return _matvec_helmholtz(x, v, dth2)

