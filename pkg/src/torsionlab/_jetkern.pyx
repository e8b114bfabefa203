# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tape evaluator: second-order jets, one point at a time.

Same contract as the pure-python fallback in ``_jetkern_py``; this version
loops instructions and index pairs in C for the hot per-point kernel.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, cosh, exp, log, pow, sin, sinh, sqrt, tan

cnp.import_array()

DEF OP_CONST = 0
DEF OP_COORD = 1
DEF OP_ADD = 2
DEF OP_SUB = 3
DEF OP_MUL = 4
DEF OP_DIV = 5
DEF OP_NEG = 6
DEF OP_POW = 7
DEF OP_SIN = 8
DEF OP_COS = 9
DEF OP_TAN = 10
DEF OP_EXP = 11
DEF OP_LOG = 12
DEF OP_SQRT = 13
DEF OP_SINH = 14
DEF OP_COSH = 15

DEF ERR_DIV_ZERO = 1
DEF ERR_LOG_DOMAIN = 2
DEF ERR_SQRT_DOMAIN = 3
DEF ERR_POW_DOMAIN = 4
DEF ERR_TAN_POLE = 5


def eval_tape(cnp.int32_t[:, ::1] code, double[::1] aux, double[:, ::1] points,
              double[:, ::1] val_regs, double[:, ::1] grad_out,
              double[:, :, ::1] hess_out):
    cdef Py_ssize_t n = code.shape[0]
    cdef Py_ssize_t N = points.shape[0]
    cdef Py_ssize_t D = points.shape[1]
    cdef double[:, ::1] g = np.empty((n, D))
    cdef double[:, :, ::1] H = np.empty((n, D, D))
    cdef Py_ssize_t p, i, j, k
    cdef int op, a, b
    cdef double u, v, vb, q, s, c, t, d, e, sh, ch, pe, t1, t2, c1, c2

    for p in range(N):
        for i in range(n):
            op = code[i, 0]
            a = code[i, 1]
            b = code[i, 2]
            if op == OP_CONST:
                val_regs[i, p] = aux[i]
                for j in range(D):
                    g[i, j] = 0.0
                    for k in range(D):
                        H[i, j, k] = 0.0
            elif op == OP_COORD:
                val_regs[i, p] = points[p, a]
                for j in range(D):
                    g[i, j] = 1.0 if j == a else 0.0
                    for k in range(D):
                        H[i, j, k] = 0.0
            elif op == OP_ADD:
                val_regs[i, p] = val_regs[a, p] + val_regs[b, p]
                for j in range(D):
                    g[i, j] = g[a, j] + g[b, j]
                    for k in range(D):
                        H[i, j, k] = H[a, j, k] + H[b, j, k]
            elif op == OP_SUB:
                val_regs[i, p] = val_regs[a, p] - val_regs[b, p]
                for j in range(D):
                    g[i, j] = g[a, j] - g[b, j]
                    for k in range(D):
                        H[i, j, k] = H[a, j, k] - H[b, j, k]
            elif op == OP_NEG:
                val_regs[i, p] = -val_regs[a, p]
                for j in range(D):
                    g[i, j] = -g[a, j]
                    for k in range(D):
                        H[i, j, k] = -H[a, j, k]
            elif op == OP_MUL:
                u = val_regs[a, p]
                vb = val_regs[b, p]
                val_regs[i, p] = u * vb
                for j in range(D):
                    g[i, j] = u * g[b, j] + vb * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = (u * H[b, j, k] + vb * H[a, j, k]
                                      + g[a, j] * g[b, k] + g[b, j] * g[a, k])
            elif op == OP_DIV:
                vb = val_regs[b, p]
                if vb == 0.0:
                    return (ERR_DIV_ZERO, i, p)
                q = val_regs[a, p] / vb
                val_regs[i, p] = q
                for j in range(D):
                    g[i, j] = (g[a, j] - q * g[b, j]) / vb
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = (H[a, j, k] - q * H[b, j, k]
                                      - g[i, j] * g[b, k] - g[b, j] * g[i, k]) / vb
            elif op == OP_POW:
                pe = aux[i]
                u = val_regs[a, p]
                if pe == 0.0:
                    val_regs[i, p] = 1.0
                    for j in range(D):
                        g[i, j] = 0.0
                        for k in range(D):
                            H[i, j, k] = 0.0
                elif pe == 1.0:
                    val_regs[i, p] = u
                    for j in range(D):
                        g[i, j] = g[a, j]
                        for k in range(D):
                            H[i, j, k] = H[a, j, k]
                else:
                    if b == 1:
                        if pe < 0.0 and u == 0.0:
                            return (ERR_POW_DOMAIN, i, p)
                    else:
                        if u <= 0.0:
                            return (ERR_POW_DOMAIN, i, p)
                    t2 = pow(u, pe - 2.0)
                    t1 = t2 * u
                    val_regs[i, p] = t1 * u
                    c1 = pe * t1
                    c2 = pe * (pe - 1.0) * t2
                    for j in range(D):
                        g[i, j] = c1 * g[a, j]
                    for j in range(D):
                        for k in range(D):
                            H[i, j, k] = c1 * H[a, j, k] + c2 * g[a, j] * g[a, k]
            elif op == OP_SIN:
                u = val_regs[a, p]
                s = sin(u)
                c = cos(u)
                val_regs[i, p] = s
                for j in range(D):
                    g[i, j] = c * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = c * H[a, j, k] - s * g[a, j] * g[a, k]
            elif op == OP_COS:
                u = val_regs[a, p]
                s = sin(u)
                c = cos(u)
                val_regs[i, p] = c
                for j in range(D):
                    g[i, j] = -s * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = -s * H[a, j, k] - c * g[a, j] * g[a, k]
            elif op == OP_TAN:
                u = val_regs[a, p]
                c = cos(u)
                if c == 0.0:
                    return (ERR_TAN_POLE, i, p)
                t = tan(u)
                d = 1.0 + t * t
                val_regs[i, p] = t
                for j in range(D):
                    g[i, j] = d * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = d * H[a, j, k] + 2.0 * t * d * g[a, j] * g[a, k]
            elif op == OP_EXP:
                e = exp(val_regs[a, p])
                val_regs[i, p] = e
                for j in range(D):
                    g[i, j] = e * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = e * (H[a, j, k] + g[a, j] * g[a, k])
            elif op == OP_LOG:
                u = val_regs[a, p]
                if u <= 0.0:
                    return (ERR_LOG_DOMAIN, i, p)
                val_regs[i, p] = log(u)
                for j in range(D):
                    g[i, j] = g[a, j] / u
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = H[a, j, k] / u - g[a, j] * g[a, k] / (u * u)
            elif op == OP_SQRT:
                u = val_regs[a, p]
                if u <= 0.0:
                    return (ERR_SQRT_DOMAIN, i, p)
                s = sqrt(u)
                val_regs[i, p] = s
                for j in range(D):
                    g[i, j] = g[a, j] / (2.0 * s)
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = H[a, j, k] / (2.0 * s) - g[a, j] * g[a, k] / (4.0 * s * u)
            elif op == OP_SINH:
                u = val_regs[a, p]
                sh = sinh(u)
                ch = cosh(u)
                val_regs[i, p] = sh
                for j in range(D):
                    g[i, j] = ch * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = ch * H[a, j, k] + sh * g[a, j] * g[a, k]
            elif op == OP_COSH:
                u = val_regs[a, p]
                sh = sinh(u)
                ch = cosh(u)
                val_regs[i, p] = ch
                for j in range(D):
                    g[i, j] = sh * g[a, j]
                for j in range(D):
                    for k in range(D):
                        H[i, j, k] = sh * H[a, j, k] + ch * g[a, j] * g[a, k]
            else:
                raise ValueError(f"unknown opcode {op}")
        for j in range(D):
            grad_out[p, j] = g[n - 1, j]
            for k in range(D):
                hess_out[p, j, k] = H[n - 1, j, k]
    return None
