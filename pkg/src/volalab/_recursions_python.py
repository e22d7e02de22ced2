"""Pure Python twin of the compiled recursion core.

Same signatures and semantics as ``volalab._recursions``; selected at import
time when the extension is unavailable (or forced via VOLALAB_PURE_PYTHON).
All functions fill preallocated output arrays and return the first step index
at which the recursion left [-700, 700] in log-variance, or -1 when clean.
Sign codes: 1 positive, 0 negative, 2 pre-sample (enters through the averaged
asymmetry coefficient).
"""

import math

__all__ = [
    "loggarch_filter",
    "loggarch_filter_grad",
    "egarch_filter",
    "egarch_filter_grad",
    "loggarch_simulate",
    "egarch_simulate",
    "lyapunov_accumulate",
]

_BOUND = 700.0


def loggarch_filter(omega, alpha_pos, alpha_neg, beta, le2, code, pre_ls, ls):
    q = len(alpha_pos)
    p = len(beta)
    n = len(ls)
    ap = alpha_pos.tolist()
    am = alpha_neg.tolist()
    b = beta.tolist()
    x = le2.tolist()
    c = code.tolist()
    pre = pre_ls.tolist()
    out = [0.0] * n
    for t in range(n):
        acc = omega
        for i in range(1, q + 1):
            idx = q + t - i
            ci = c[idx]
            if ci == 1:
                acc += ap[i - 1] * x[idx]
            elif ci == 0:
                acc += am[i - 1] * x[idx]
            else:
                acc += 0.5 * (ap[i - 1] + am[i - 1]) * x[idx]
        for j in range(1, p + 1):
            k = t - j
            acc += b[j - 1] * (out[k] if k >= 0 else pre[j - t - 1])
        if not -_BOUND <= acc <= _BOUND:
            ls[:t] = out[:t]
            ls[t] = acc
            return t
        out[t] = acc
    ls[:] = out
    return -1


def loggarch_filter_grad(omega, alpha_pos, alpha_neg, beta, le2, code, pre_ls, ls, grad):
    q = len(alpha_pos)
    p = len(beta)
    n = len(ls)
    d = 1 + 2 * q + p
    ap = alpha_pos.tolist()
    am = alpha_neg.tolist()
    b = beta.tolist()
    x = le2.tolist()
    c = code.tolist()
    pre = pre_ls.tolist()
    out = [0.0] * n
    g = [[0.0] * d for _ in range(n)]
    for t in range(n):
        acc = omega
        row = g[t]
        row[0] = 1.0
        for i in range(1, q + 1):
            idx = q + t - i
            ci = c[idx]
            xi = x[idx]
            if ci == 1:
                acc += ap[i - 1] * xi
                row[i] = xi
            elif ci == 0:
                acc += am[i - 1] * xi
                row[q + i] = xi
            else:
                acc += 0.5 * (ap[i - 1] + am[i - 1]) * xi
                row[i] = 0.5 * xi
                row[q + i] = 0.5 * xi
        for j in range(1, p + 1):
            k = t - j
            bj = b[j - 1]
            if k >= 0:
                acc += bj * out[k]
                row[2 * q + j] = out[k]
                prev = g[k]
                for a in range(d):
                    row[a] += bj * prev[a]
            else:
                lag = pre[j - t - 1]
                acc += bj * lag
                row[2 * q + j] += lag
        if not -_BOUND <= acc <= _BOUND:
            ls[:t] = out[:t]
            ls[t] = acc
            for s in range(t + 1):
                grad[s, :] = g[s]
            return t
        out[t] = acc
    ls[:] = out
    grad[:, :] = g
    return -1


def egarch_filter(omega, beta, gamma, delta, eps, pre_ls, ls, eta):
    p = len(beta)
    ell = len(gamma)
    n = len(ls)
    b = beta.tolist()
    g = gamma.tolist()
    dl = delta.tolist()
    e = eps.tolist()
    pre = pre_ls.tolist()
    out = [0.0] * n
    et = [0.0] * n
    for t in range(n):
        acc = omega
        for j in range(1, p + 1):
            k = t - j
            acc += b[j - 1] * (out[k] if k >= 0 else pre[j - t - 1])
        for i in range(1, ell + 1):
            k = t - i
            if k >= 0:
                acc += g[i - 1] * et[k] + dl[i - 1] * abs(et[k])
        if not -_BOUND <= acc <= _BOUND:
            ls[:t] = out[:t]
            ls[t] = acc
            eta[:t] = et[:t]
            return t
        out[t] = acc
        et[t] = e[t] * math.exp(-0.5 * acc)
    ls[:] = out
    eta[:] = et
    return -1


def egarch_filter_grad(omega, beta, gamma, delta, eps, pre_ls, ls, eta, grad):
    p = len(beta)
    ell = len(gamma)
    n = len(ls)
    d = 1 + p + 2 * ell
    b = beta.tolist()
    g = gamma.tolist()
    dl = delta.tolist()
    e = eps.tolist()
    pre = pre_ls.tolist()
    out = [0.0] * n
    et = [0.0] * n
    gr = [[0.0] * d for _ in range(n)]
    for t in range(n):
        acc = omega
        row = gr[t]
        row[0] = 1.0
        for j in range(1, p + 1):
            k = t - j
            bj = b[j - 1]
            if k >= 0:
                acc += bj * out[k]
                row[j] = out[k]
                prev = gr[k]
                for a in range(d):
                    row[a] += bj * prev[a]
            else:
                lag = pre[j - t - 1]
                acc += bj * lag
                row[j] += lag
        for i in range(1, ell + 1):
            k = t - i
            if k >= 0:
                ek = et[k]
                aek = abs(ek)
                acc += g[i - 1] * ek + dl[i - 1] * aek
                row[p + i] += ek
                row[p + ell + i] += aek
                w = -0.5 * (g[i - 1] * ek + dl[i - 1] * aek)
                prev = gr[k]
                for a in range(d):
                    row[a] += w * prev[a]
        if not -_BOUND <= acc <= _BOUND:
            ls[:t] = out[:t]
            ls[t] = acc
            eta[:t] = et[:t]
            for s in range(t + 1):
                grad[s, :] = gr[s]
            return t
        out[t] = acc
        et[t] = e[t] * math.exp(-0.5 * acc)
    ls[:] = out
    eta[:] = et
    grad[:, :] = gr
    return -1


def loggarch_simulate(omega, alpha_pos, alpha_neg, beta, log_eta2, is_pos, ls, start):
    q = len(alpha_pos)
    p = len(beta)
    total = len(ls)
    ap = alpha_pos.tolist()
    am = alpha_neg.tolist()
    b = beta.tolist()
    v = log_eta2.tolist()
    s = is_pos.tolist()
    out = ls[:start].tolist() + [0.0] * (total - start)
    for t in range(start, total):
        acc = omega
        for i in range(1, q + 1):
            k = t - i
            coef = ap[i - 1] if s[k] else am[i - 1]
            acc += coef * (out[k] + v[k])
        for j in range(1, p + 1):
            acc += b[j - 1] * out[t - j]
        if not -_BOUND <= acc <= _BOUND:
            ls[start:t] = out[start:t]
            ls[t] = acc
            return t
        out[t] = acc
    ls[start:] = out[start:]
    return -1


def egarch_simulate(omega, beta, gamma, delta, eta, ls, start):
    p = len(beta)
    ell = len(gamma)
    total = len(ls)
    b = beta.tolist()
    g = gamma.tolist()
    dl = delta.tolist()
    e = eta.tolist()
    out = ls[:start].tolist() + [0.0] * (total - start)
    for t in range(start, total):
        acc = omega
        for j in range(1, p + 1):
            acc += b[j - 1] * out[t - j]
        for i in range(1, ell + 1):
            ek = e[t - i]
            acc += g[i - 1] * ek + dl[i - 1] * abs(ek)
        if not -_BOUND <= acc <= _BOUND:
            ls[start:t] = out[start:t]
            ls[t] = acc
            return t
        out[t] = acc
    ls[start:] = out[start:]
    return -1


def lyapunov_accumulate(cp, cm, is_pos, discard):
    """Accumulate log operator-1-norms of the renormalized matrix product.

    Returns (sum of log norms after the warm-up, number of accumulated steps,
    step index at which the product vanished or -1).
    """
    dim = cp.shape[0]
    a = cp.tolist()
    bm = cm.tolist()
    s = is_pos.tolist()
    horizon = len(s)
    m = [[1.0 if i == j else 0.0 for j in range(dim)] for i in range(dim)]
    acc = 0.0
    used = 0
    for step in range(horizon):
        c = a if s[step] else bm
        nxt = [[0.0] * dim for _ in range(dim)]
        for i in range(dim):
            ci = c[i]
            row = nxt[i]
            for k in range(dim):
                cik = ci[k]
                if cik != 0.0:
                    mk = m[k]
                    for j in range(dim):
                        row[j] += cik * mk[j]
        norm = 0.0
        for j in range(dim):
            col = 0.0
            for i in range(dim):
                col += abs(nxt[i][j])
            if col > norm:
                norm = col
        if norm == 0.0:
            return acc, used, step
        inv = 1.0 / norm
        for i in range(dim):
            row = nxt[i]
            for j in range(dim):
                row[j] *= inv
        m = nxt
        if step >= discard:
            acc += math.log(norm)
            used += 1
    return acc, used, -1
