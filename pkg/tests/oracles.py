"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately written the slow, obvious way and stays
independent of the package code paths it checks.
"""

import math

import numpy as np


def matmul_triple_loop(a, b):
    """Naive matrix product, inner index ascending."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += a[i, t] * b[t, j]
            out[i, j] = s
    return out


def softmax_closed(xs):
    mx = max(xs)
    es = [math.exp(x - mx) for x in xs]
    z = sum(es)
    return [e / z for e in es]


def lstm_step_scalar(x, h, c, wx, wh, b, hidden):
    """One LSTM step with per-gate python loops. Gate order: i, f, o, g."""
    gates = []
    for u in range(4 * hidden):
        s = 0.0
        for t in range(len(x)):
            s += x[t] * wx[t][u]
        for t in range(len(h)):
            s += h[t] * wh[t][u]
        gates.append(s + b[u])

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    h_new, c_new = [], []
    for u in range(hidden):
        i = sig(gates[u])
        f = sig(gates[hidden + u])
        o = sig(gates[2 * hidden + u])
        g = math.tanh(gates[3 * hidden + u])
        cu = f * c[u] + i * g
        c_new.append(cu)
        h_new.append(o * math.tanh(cu))
    return h_new, c_new


def lstm_run_scalar(xs, wx, wh, b, hidden):
    """Full LSTM over a sequence of input vectors; returns all hidden states."""
    h = [0.0] * hidden
    c = [0.0] * hidden
    states = []
    for x in xs:
        h, c = lstm_step_scalar(list(x), h, c, wx, wh, b, hidden)
        states.append(list(h))
    return states


def similarity_pair_loop(h_d, h_b, w0):
    """s_ij = w0 . [h_i ; h_j ; h_i*h_j] computed pair by pair."""
    m, d = h_d.shape
    n = h_b.shape[0]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            vec = list(h_d[i]) + list(h_b[j]) + [h_d[i][t] * h_b[j][t] for t in range(d)]
            s = 0.0
            for t in range(3 * d):
                s += w0[t] * vec[t]
            out[i, j] = s
    return out


def attend_double_sum(s_row, s_col, h_d, h_b):
    """A and B as explicit weighted double sums."""
    m, n = s_row.shape
    d = h_d.shape[1]
    a = np.zeros((m, d))
    for i in range(m):
        for t in range(d):
            s = 0.0
            for j in range(n):
                s += s_row[i, j] * h_b[j, t]
            a[i, t] = s
    b = np.zeros((m, d))
    for i in range(m):
        for t in range(d):
            s = 0.0
            for q in range(m):
                w = 0.0
                for j in range(n):
                    w += s_row[i, j] * s_col[q, j]
                s += w * h_d[q, t]
            b[i, t] = s
    return a, b


def rouge_n_brute(cand, ref, n):
    """Clipped n-gram overlap with hash-free nested loops."""
    cgrams = [tuple(cand[i:i + n]) for i in range(len(cand) - n + 1)]
    rgrams = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
    used = [False] * len(rgrams)
    overlap = 0
    for g in cgrams:
        for j in range(len(rgrams)):
            if not used[j] and rgrams[j] == g:
                used[j] = True
                overlap += 1
                break
    p = overlap / len(cgrams) if cgrams else 0.0
    r = overlap / len(rgrams) if rgrams else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def lcs_full_table(a, b):
    """LCS length via the full dynamic-programming table."""
    m, n = len(a), len(b)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if a[i - 1] == b[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + 1
            else:
                dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
    return dp[m][n]


def rake_brute(tokens, stopwords):
    """RAKE scores via an explicit co-occurrence matrix.

    freq comes from direct occurrence counts; degree(w) is the row sum of
    the matrix where every ordered pair of positions inside a candidate
    phrase (including a position with itself) contributes one count.
    """

    def is_delim(tok):
        return tok in stopwords or not any(ch.isalnum() for ch in tok)

    phrases = []
    cur = []
    for tok in tokens:
        if is_delim(tok):
            if cur:
                phrases.append(cur)
            cur = []
        else:
            cur.append(tok)
    if cur:
        phrases.append(cur)

    words = sorted({w for ph in phrases for w in ph})
    index = {w: i for i, w in enumerate(words)}
    co = [[0] * len(words) for _ in words]
    freq = {w: 0 for w in words}
    for ph in phrases:
        for w in ph:
            freq[w] += 1
            for v in ph:
                co[index[w]][index[v]] += 1
    degree = {w: sum(co[index[w]]) for w in words}
    score = {w: degree[w] / freq[w] for w in words}

    seen = set()
    ranked = []
    for ph in phrases:
        key = tuple(ph)
        if key in seen:
            continue
        seen.add(key)
        ranked.append((list(ph), sum(score[w] for w in ph)))
    ranked.sort(key=lambda item: -item[1])
    # python sort is stable, so ties keep first-occurrence order
    return ranked
