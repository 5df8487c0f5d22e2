# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled element kernels; signature-compatible with ``_numpy``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "fast"


def element_strains(double[::1] u, long[:, ::1] tris, double[:, ::1] gx, double[:, ::1] gy):
    cdef Py_ssize_t ne = tris.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((ne, 3))
    cdef double[:, ::1] s = out
    cdef Py_ssize_t e, a
    cdef long node
    cdef double exx, eyy, gxy, gyx, uxa, uya
    for e in range(ne):
        exx = 0.0
        eyy = 0.0
        gxy = 0.0
        gyx = 0.0
        for a in range(3):
            node = tris[e, a]
            uxa = u[2 * node]
            uya = u[2 * node + 1]
            exx += gx[e, a] * uxa
            eyy += gy[e, a] * uya
            gxy += gy[e, a] * uxa
            gyx += gx[e, a] * uya
        s[e, 0] = exx
        s[e, 1] = eyy
        s[e, 2] = 0.5 * (gxy + gyx)
    return out


def elastic_state(double[:, ::1] strains, double mu, double kappa):
    cdef Py_ssize_t ne = strains.shape[0]
    cdef cnp.ndarray[double, ndim=1] tens = np.empty(ne)
    cdef cnp.ndarray[double, ndim=1] comp = np.empty(ne)
    cdef cnp.ndarray[double, ndim=1] trace = np.empty(ne)
    cdef double[::1] tv = tens
    cdef double[::1] cv = comp
    cdef double[::1] rv = trace
    cdef Py_ssize_t e
    cdef double e1, e2, e3, tr, dev2, trp, trm
    for e in range(ne):
        e1 = strains[e, 0]
        e2 = strains[e, 1]
        e3 = strains[e, 2]
        tr = e1 + e2
        dev2 = e1 * e1 + e2 * e2 + 2.0 * e3 * e3 - 0.5 * tr * tr
        trp = tr if tr > 0.0 else 0.0
        trm = -tr if tr < 0.0 else 0.0
        tv[e] = mu * dev2 + kappa * 0.5 * trp * trp
        cv[e] = kappa * 0.5 * trm * trm
        rv[e] = tr
    return tens, comp, trace


def scatter_vertex(double[::1] vals, long[:, ::1] tris, double[::1] areas, Py_ssize_t n_nodes):
    cdef cnp.ndarray[double, ndim=1] q = np.zeros(n_nodes)
    cdef double[::1] qv = q
    cdef Py_ssize_t e, a
    cdef double w
    for e in range(tris.shape[0]):
        w = vals[e] * areas[e] / 3.0
        for a in range(3):
            qv[tris[e, a]] += w
    return q


def residual_u(double[:, ::1] strains, double[::1] hbar, double[::1] areas,
               long[:, ::1] tris, double[:, ::1] gx, double[:, ::1] gy,
               double mu, double kappa, Py_ssize_t n_nodes):
    cdef cnp.ndarray[double, ndim=1] r = np.zeros(2 * n_nodes)
    cdef double[::1] rv = r
    cdef Py_ssize_t e, a
    cdef long node
    cdef double e1, e2, e3, tr, am, vol, s1, s2, s3, ha, trp, trm
    for e in range(strains.shape[0]):
        e1 = strains[e, 0]
        e2 = strains[e, 1]
        e3 = strains[e, 2]
        tr = e1 + e2
        am = hbar[e] * mu
        trp = tr if tr > 0.0 else 0.0
        trm = -tr if tr < 0.0 else 0.0
        vol = hbar[e] * kappa * trp - kappa * trm
        s1 = 2.0 * am * e1 - am * tr + vol
        s2 = 2.0 * am * e2 - am * tr + vol
        s3 = 4.0 * am * e3
        ha = 0.5 * areas[e]
        for a in range(3):
            node = tris[e, a]
            rv[2 * node] += ha * (s1 * gx[e, a] + 0.5 * s3 * gy[e, a])
            rv[2 * node + 1] += ha * (s2 * gy[e, a] + 0.5 * s3 * gx[e, a])
    return r


def tangent_values(double[:, ::1] strains, double[::1] hbar, double[::1] areas,
                   double[:, ::1] gx, double[:, ::1] gy, double mu, double kappa):
    cdef Py_ssize_t ne = strains.shape[0]
    cdef cnp.ndarray[double, ndim=3] H = np.zeros((ne, 6, 6))
    cdef double[:, :, ::1] Hv = H
    cdef Py_ssize_t e, i, j, k, l
    cdef double tr, am, b, ha
    cdef double B[3][6]
    cdef double D[3][3]
    cdef double DB[3][6]
    for e in range(ne):
        tr = strains[e, 0] + strains[e, 1]
        am = hbar[e] * mu
        if tr >= 0.0:
            b = hbar[e] * kappa - am
        else:
            b = kappa - am
        ha = 0.5 * areas[e]
        for i in range(3):
            for j in range(6):
                B[i][j] = 0.0
        for i in range(3):
            B[0][2 * i] = gx[e, i]
            B[1][2 * i + 1] = gy[e, i]
            B[2][2 * i] = 0.5 * gy[e, i]
            B[2][2 * i + 1] = 0.5 * gx[e, i]
        D[0][0] = 2.0 * am + b
        D[0][1] = b
        D[0][2] = 0.0
        D[1][0] = b
        D[1][1] = 2.0 * am + b
        D[1][2] = 0.0
        D[2][0] = 0.0
        D[2][1] = 0.0
        D[2][2] = 4.0 * am
        for i in range(3):
            for j in range(6):
                DB[i][j] = 0.0
                for k in range(3):
                    DB[i][j] += D[i][k] * B[k][j]
        for i in range(6):
            for j in range(6):
                for k in range(3):
                    Hv[e, i, j] += B[k][i] * DB[k][j]
                Hv[e, i, j] *= ha
    return H


def elastic_energy(double[:, ::1] strains, double[::1] hbar, double[::1] areas,
                   double mu, double kappa):
    cdef Py_ssize_t e
    cdef double e1, e2, e3, tr, dev2, trp, trm, tens, comp, acc
    acc = 0.0
    for e in range(strains.shape[0]):
        e1 = strains[e, 0]
        e2 = strains[e, 1]
        e3 = strains[e, 2]
        tr = e1 + e2
        dev2 = e1 * e1 + e2 * e2 + 2.0 * e3 * e3 - 0.5 * tr * tr
        trp = tr if tr > 0.0 else 0.0
        trm = -tr if tr < 0.0 else 0.0
        tens = mu * dev2 + kappa * 0.5 * trp * trp
        comp = kappa * 0.5 * trm * trm
        acc += areas[e] * (hbar[e] * tens + comp)
    return 0.5 * acc
