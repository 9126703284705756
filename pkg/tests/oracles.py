"""Independent reference implementations used to cross-check the engine.

Everything here is deliberately written against the problem statement,
not against the package internals: plain term-rewriting for normal
forms, series division for the Bernoulli generator, a degree-by-degree
recurrence for the derivative components, and a straight-line block
expansion for the q-linear part of the merged psi matrix.
"""

import random
from fractions import Fraction
from math import factorial

from ncdc import (GR_ONE, MatrixSeries, MomentumPolynomial,
                  bernoulli_psi_coeffs, build_momentum_matrix, gaussian,
                  merge_table)

_RANK = {"x": 0, "xi": 1, "d": 2, "q": 3}


def _merge(dst, src, c=1):
    for k, v in src.items():
        nv = dst.get(k, gaussian(0)) + v * c
        if nv:
            dst[k] = nv
        elif k in dst:
            del dst[k]
    return dst


def weyl_normalize(word, coeff=GR_ONE):
    """Normal-order a word of ("x"|"xi"|"d"|"q", index) symbols.

    One rewriting step at the first out-of-order adjacent pair; the
    contraction rules are [d_i, x_j] = delta and {q_a, xi_b} = delta,
    odd generators of the same kind anticommute, everything else
    commutes.  Returns {sorted word: coefficient}.
    """
    for i in range(len(word) - 1):
        (k1, i1), (k2, i2) = word[i], word[i + 1]
        swapped = word[:i] + (word[i + 1], word[i]) + word[i + 2:]
        dropped = word[:i] + word[i + 2:]
        if _RANK[k1] > _RANK[k2]:
            out = {}
            if k1 == "d" and k2 == "x":
                _merge(out, weyl_normalize(swapped, coeff))
                if i1 == i2:
                    _merge(out, weyl_normalize(dropped, coeff))
            elif k1 == "q" and k2 == "xi":
                _merge(out, weyl_normalize(swapped, -coeff))
                if i1 == i2:
                    _merge(out, weyl_normalize(dropped, coeff))
            else:
                both_odd = k1 in ("xi", "q") and k2 in ("xi", "q")
                _merge(out, weyl_normalize(swapped, -coeff if both_odd else coeff))
            return out
        if _RANK[k1] == _RANK[k2]:
            if k1 in ("xi", "q"):
                if i1 == i2:
                    return {}
                if i1 > i2:
                    return weyl_normalize(swapped, -coeff)
            elif i1 > i2:
                return weyl_normalize(swapped, coeff)
    return {tuple(word): coeff}


def word_to_mono(word, n, m):
    """Sorted symbol word -> the engine's (xpow, xi, dpow, q) monomial key."""
    xp, dp = [0] * n, [0] * n
    xi, q = [], []
    for kind, idx in word:
        if kind == "x":
            xp[idx - 1] += 1
        elif kind == "d":
            dp[idx - 1] += 1
        elif kind == "xi":
            xi.append(idx)
        else:
            q.append(idx)
    return (tuple(xp), tuple(xi), tuple(dp), tuple(q))


def pbw_normalize(s, word, coeff=GR_ONE, rng=None):
    """Normal-order a generator word in the enveloping algebra.

    Rewrites Z_u Z_v = (-1)^{|u||v|} Z_v Z_u + sum_J table_{u v J} Z_J at
    an out-of-order adjacent pair; when ``rng`` is given the pair is
    chosen at random, exercising confluence of the rewriting system.
    """
    table = merge_table(s)
    par = table.parity
    adj = {}
    for (u, v, j), val in table.entries.items():
        adj.setdefault((u, v), []).append((j, val))

    def step(w, c, out):
        spots = [i for i in range(len(w) - 1)
                 if w[i] > w[i + 1] or (w[i] == w[i + 1] and par[w[i]])]
        if not spots:
            _merge(out, {tuple(w): c})
            return
        i = spots[0] if rng is None else rng.choice(spots)
        u, v = w[i], w[i + 1]
        if u == v:
            # odd square: 2 Z_u Z_u = [Z_u, Z_u] = sum_J table Z_J (zero here)
            for j, val in adj.get((u, v), []):
                step(w[:i] + (j,) + w[i + 2:], c * val * Fraction(1, 2), out)
            return
        sign = -1 if par[u] and par[v] else 1
        step(w[:i] + (v, u) + w[i + 2:], c * sign if sign < 0 else c, out)
        for j, val in adj.get((u, v), []):
            step(w[:i] + (j,) + w[i + 2:], c * val, out)

    out = {}
    step(tuple(word), coeff, out)
    return out


def pbw_key(word, n):
    """Sorted generator word -> (coordinate powers, one-form index tuple)."""
    xp = [0] * n
    theta = []
    for g in word:
        if g <= n:
            xp[g - 1] += 1
        else:
            theta.append(g - n)
    return (tuple(xp), tuple(theta))


def psi_coeffs_by_division(deg):
    """Solve (1 - e^{-t}) * psi(t) = t for the series coefficients."""
    den = [Fraction(0)] + [Fraction((-1) ** (j + 1), factorial(j))
                           for j in range(1, deg + 2)]
    psi = []
    for k in range(deg + 1):
        target = Fraction(1 if k == 0 else 0)
        acc = sum((den[j] * psi[k + 1 - j] for j in range(2, k + 2)), Fraction(0))
        psi.append((target - acc) / den[1])
    return psi


def lambda_by_recurrence(s, d):
    """Derivative components from the degree-by-degree recurrence.

    level 1 is the plain momentum; level k+1 is -1/(k+1) times the
    K-matrix contraction of level k.  Valid to order d.
    """
    n, m = s.n, s.m
    kk = build_momentum_matrix(s, "K")
    level = [MomentumPolynomial.momentum(n, m, al) for al in range(1, n + 1)]
    total = list(level)
    for k in range(1, d):
        nxt = []
        for al in range(1, n + 1):
            acc = MomentumPolynomial.zero(n, m)
            for be in range(1, n + 1):
                acc = acc + kk.at(be, al) * level[be - 1]
            nxt.append(acc.scale(Fraction(-1, k + 1)))
        level = nxt
        total = [t + l for t, l in zip(total, nxt)]
    return [t.truncate(d) for t in total]


def f_block_straight_line(s, d):
    """Top-right block of psi over the merged table, expanded directly:

        sum_{k>=1} c_k sum_{l=1}^{k} C^(k-l) L K^(l-1)

    with L_{mu a} = -sum_b K_{b mu a} q_b.  Independent of the engine's
    blocked evaluation."""
    n, m = s.n, s.m
    cc = build_momentum_matrix(s, "C")
    kk = build_momentum_matrix(s, "K")
    ell = [[MomentumPolynomial.zero(n, m) for _ in range(m)] for _ in range(n)]
    for mu in range(1, n + 1):
        for a in range(1, m + 1):
            acc = MomentumPolynomial.zero(n, m)
            for b in range(1, m + 1):
                kv = s.K(b, mu, a)
                if kv:
                    acc = acc - MomentumPolynomial.odd_unit(n, m, b).scale(kv)
            ell[mu - 1][a - 1] = acc
    ell = MatrixSeries(ell)
    cs = bernoulli_psi_coeffs(d + 1).coefficients
    cpow = [MatrixSeries.identity(n, n, m)]
    kpow = [MatrixSeries.identity(m, n, m)]
    for _ in range(d + 1):
        cpow.append((cpow[-1] * cc).truncate(d + 1))
        kpow.append((kpow[-1] * kk).truncate(d + 1))
    out = MatrixSeries.zeros(n, m, n, m)
    for k in range(1, d + 2):
        if not cs[k]:
            continue
        inner = MatrixSeries.zeros(n, m, n, m)
        for l in range(1, k + 1):
            inner = inner + (cpow[k - l] * ell * kpow[l - 1]).truncate(d + 1)
        out = out + inner.scale(cs[k])
    return out.truncate(d)
