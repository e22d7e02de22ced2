# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled recursion core. Semantics mirror _recursions_python exactly."""

from libc.math cimport exp, fabs, log

import numpy as np

cimport numpy as cnp

cnp.import_array()

__all__ = [
    "loggarch_filter",
    "loggarch_filter_grad",
    "egarch_filter",
    "egarch_filter_grad",
    "loggarch_simulate",
    "egarch_simulate",
    "lyapunov_accumulate",
]

cdef double _BOUND = 700.0


def loggarch_filter(double omega,
                    double[::1] alpha_pos, double[::1] alpha_neg, double[::1] beta,
                    double[::1] le2, unsigned char[::1] code, double[::1] pre_ls,
                    double[::1] ls):
    cdef Py_ssize_t q = alpha_pos.shape[0]
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t n = ls.shape[0]
    cdef Py_ssize_t t, i, j, idx, k
    cdef double acc
    cdef unsigned char ci
    for t in range(n):
        acc = omega
        for i in range(1, q + 1):
            idx = q + t - i
            ci = code[idx]
            if ci == 1:
                acc += alpha_pos[i - 1] * le2[idx]
            elif ci == 0:
                acc += alpha_neg[i - 1] * le2[idx]
            else:
                acc += 0.5 * (alpha_pos[i - 1] + alpha_neg[i - 1]) * le2[idx]
        for j in range(1, p + 1):
            k = t - j
            if k >= 0:
                acc += beta[j - 1] * ls[k]
            else:
                acc += beta[j - 1] * pre_ls[j - t - 1]
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
    return -1


def loggarch_filter_grad(double omega,
                         double[::1] alpha_pos, double[::1] alpha_neg, double[::1] beta,
                         double[::1] le2, unsigned char[::1] code, double[::1] pre_ls,
                         double[::1] ls, double[:, ::1] grad):
    cdef Py_ssize_t q = alpha_pos.shape[0]
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t n = ls.shape[0]
    cdef Py_ssize_t d = 1 + 2 * q + p
    cdef Py_ssize_t t, i, j, idx, k, a
    cdef double acc, xi, bj, lag
    cdef unsigned char ci
    grad[:, :] = 0.0
    for t in range(n):
        acc = omega
        grad[t, 0] = 1.0
        for i in range(1, q + 1):
            idx = q + t - i
            ci = code[idx]
            xi = le2[idx]
            if ci == 1:
                acc += alpha_pos[i - 1] * xi
                grad[t, i] = xi
            elif ci == 0:
                acc += alpha_neg[i - 1] * xi
                grad[t, q + i] = xi
            else:
                acc += 0.5 * (alpha_pos[i - 1] + alpha_neg[i - 1]) * xi
                grad[t, i] = 0.5 * xi
                grad[t, q + i] = 0.5 * xi
        for j in range(1, p + 1):
            k = t - j
            bj = beta[j - 1]
            if k >= 0:
                acc += bj * ls[k]
                grad[t, 2 * q + j] = ls[k]
                for a in range(d):
                    grad[t, a] += bj * grad[k, a]
            else:
                lag = pre_ls[j - t - 1]
                acc += bj * lag
                grad[t, 2 * q + j] += lag
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
    return -1


def egarch_filter(double omega,
                  double[::1] beta, double[::1] gamma, double[::1] delta,
                  double[::1] eps, double[::1] pre_ls,
                  double[::1] ls, double[::1] eta):
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t ell = gamma.shape[0]
    cdef Py_ssize_t n = ls.shape[0]
    cdef Py_ssize_t t, i, j, k
    cdef double acc
    for t in range(n):
        acc = omega
        for j in range(1, p + 1):
            k = t - j
            if k >= 0:
                acc += beta[j - 1] * ls[k]
            else:
                acc += beta[j - 1] * pre_ls[j - t - 1]
        for i in range(1, ell + 1):
            k = t - i
            if k >= 0:
                acc += gamma[i - 1] * eta[k] + delta[i - 1] * fabs(eta[k])
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
        eta[t] = eps[t] * exp(-0.5 * acc)
    return -1


def egarch_filter_grad(double omega,
                       double[::1] beta, double[::1] gamma, double[::1] delta,
                       double[::1] eps, double[::1] pre_ls,
                       double[::1] ls, double[::1] eta, double[:, ::1] grad):
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t ell = gamma.shape[0]
    cdef Py_ssize_t n = ls.shape[0]
    cdef Py_ssize_t d = 1 + p + 2 * ell
    cdef Py_ssize_t t, i, j, k, a
    cdef double acc, bj, lag, ek, aek, w
    grad[:, :] = 0.0
    for t in range(n):
        acc = omega
        grad[t, 0] = 1.0
        for j in range(1, p + 1):
            k = t - j
            bj = beta[j - 1]
            if k >= 0:
                acc += bj * ls[k]
                grad[t, j] = ls[k]
                for a in range(d):
                    grad[t, a] += bj * grad[k, a]
            else:
                lag = pre_ls[j - t - 1]
                acc += bj * lag
                grad[t, j] += lag
        for i in range(1, ell + 1):
            k = t - i
            if k >= 0:
                ek = eta[k]
                aek = fabs(ek)
                acc += gamma[i - 1] * ek + delta[i - 1] * aek
                grad[t, p + i] += ek
                grad[t, p + ell + i] += aek
                w = -0.5 * (gamma[i - 1] * ek + delta[i - 1] * aek)
                for a in range(d):
                    grad[t, a] += w * grad[k, a]
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
        eta[t] = eps[t] * exp(-0.5 * acc)
    return -1


def loggarch_simulate(double omega,
                      double[::1] alpha_pos, double[::1] alpha_neg, double[::1] beta,
                      double[::1] log_eta2, unsigned char[::1] is_pos,
                      double[::1] ls, Py_ssize_t start):
    cdef Py_ssize_t q = alpha_pos.shape[0]
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t total = ls.shape[0]
    cdef Py_ssize_t t, i, j, k
    cdef double acc
    for t in range(start, total):
        acc = omega
        for i in range(1, q + 1):
            k = t - i
            if is_pos[k]:
                acc += alpha_pos[i - 1] * (ls[k] + log_eta2[k])
            else:
                acc += alpha_neg[i - 1] * (ls[k] + log_eta2[k])
        for j in range(1, p + 1):
            acc += beta[j - 1] * ls[t - j]
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
    return -1


def egarch_simulate(double omega,
                    double[::1] beta, double[::1] gamma, double[::1] delta,
                    double[::1] eta, double[::1] ls, Py_ssize_t start):
    cdef Py_ssize_t p = beta.shape[0]
    cdef Py_ssize_t ell = gamma.shape[0]
    cdef Py_ssize_t total = ls.shape[0]
    cdef Py_ssize_t t, i, j
    cdef double acc, ek
    for t in range(start, total):
        acc = omega
        for j in range(1, p + 1):
            acc += beta[j - 1] * ls[t - j]
        for i in range(1, ell + 1):
            ek = eta[t - i]
            acc += gamma[i - 1] * ek + delta[i - 1] * fabs(ek)
        ls[t] = acc
        if not (-_BOUND <= acc <= _BOUND):
            return t
    return -1


def lyapunov_accumulate(double[:, ::1] cp, double[:, ::1] cm,
                        unsigned char[::1] is_pos, Py_ssize_t discard):
    cdef Py_ssize_t dim = cp.shape[0]
    cdef Py_ssize_t horizon = is_pos.shape[0]
    cdef Py_ssize_t step, i, j, k, used = 0
    cdef double acc = 0.0
    cdef double norm, col, cik, inv
    cdef double[:, ::1] m = np.eye(dim)
    cdef double[:, ::1] nxt = np.empty((dim, dim))
    cdef double[:, ::1] c
    cdef double[:, ::1] tmp
    for step in range(horizon):
        c = cp if is_pos[step] else cm
        for i in range(dim):
            for j in range(dim):
                nxt[i, j] = 0.0
            for k in range(dim):
                cik = c[i, k]
                if cik != 0.0:
                    for j in range(dim):
                        nxt[i, j] += cik * m[k, j]
        norm = 0.0
        for j in range(dim):
            col = 0.0
            for i in range(dim):
                col += fabs(nxt[i, j])
            if col > norm:
                norm = col
        if norm == 0.0:
            return acc, used, step
        inv = 1.0 / norm
        for i in range(dim):
            for j in range(dim):
                nxt[i, j] *= inv
        tmp = m
        m = nxt
        nxt = tmp
        if step >= discard:
            acc += log(norm)
            used += 1
    return acc, used, -1
