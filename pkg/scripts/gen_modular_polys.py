#!/usr/bin/env python3
"""Generate the bundled classical modular polynomial table (exact, over Z).

Method: with j(x) = 1/x + 744 + ... the q-expansion of the j-function, the
degree-(l+1) modular polynomial is Phi_l(X, j) = prod (X - f_i) over the
functions f_k = j((tau+k)/l), k < l, and f_l = j(l*tau).  Power sums of the
f_i have q-expansions computable from powers of j(x) alone:

    p_m = l * sum_t d_{l*t} q^t  +  sum_n d_n q^{l*n},   d := coeffs of j(x)^m

(the first sum is the zeta-averaged part, the second is j(l*tau)^m).  Each
p_m is a polynomial in j, recovered by peeling the principal part against
q-expansions of powers of j; Newton's identities then give the elementary
symmetric functions e_m(j), i.e. the coefficients of Phi_l.

Everything is exact integer arithmetic.  The script self-checks:
  * deg_j e_m <= l+1 and exact divisibility in Newton's identities,
  * symmetry of the coefficient grid,
  * the full grid of Phi_2 against the classical textbook coefficients,
  * Phi_l(j(q), j(q^l)) = 0 mod a large prime to ~40 coefficients.

Writes src/ssforms/data/modular_polynomials.txt with lines "l i k c"
(coefficient c of X^i Y^k, only i >= k stored) and prints the file's sha256.
"""

import hashlib
import sys
from pathlib import Path

LEVELS = [2, 3, 5, 7, 11, 13]

CLASSICAL_PHI2 = {
    (3, 0): 1,
    (2, 2): -1,
    (2, 1): 1488,
    (2, 0): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000,
    (0, 0): -157464000000000,
}


def series_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        top = min(n - i, len(b))
        for j in range(top):
            out[i + j] += x * b[j]
    return out


def series_inv(a, n):
    assert a[0] == 1
    inv = [0] * n
    inv[0] = 1
    for k in range(1, n):
        s = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            s += a[i] * inv[k - i]
        inv[k] = -s
    return inv


def j_coefficients(n):
    """c_{-1}..c_{n-2}: integer q-expansion of j, c[i] = coeff of q^(i-1)."""
    sigma3 = [0] * n
    for d in range(1, n):
        d3 = d * d * d
        for k in range(d, n, d):
            sigma3[k] += d3
    e4 = [1] + [240 * sigma3[k] for k in range(1, n)]
    eta3 = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        eta3[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    s2 = series_mul(eta3, eta3, n)
    s4 = series_mul(s2, s2, n)
    s8 = series_mul(s4, s4, n)
    e43 = series_mul(series_mul(e4, e4, n), e4, n)
    return series_mul(e43, series_inv(s8, n), n)


def make_phi(ell):
    deg = ell + 1
    pmax = ell * deg
    # j-power windows: pow_w[k][e + k] = coeff of q^e in j^k, e in [-k, +2]
    T = pmax + 6
    c = j_coefficients(T)  # c[i] = coeff of q^(i-1)

    def jcoef(e):
        return c[e + 1] if -1 <= e <= T - 2 else 0

    # j^k held on exponents [-k, U(k)]; the top shrinks with k because each
    # product consumes one exponent of headroom from the previous power.
    def U(k):
        return 2 + (pmax - k)

    pow_w = {0: [1] + [0] * U(0)}
    prev = None
    for k in range(1, pmax + 1):
        w = []
        for e in range(-k, U(k) + 1):
            s = 0
            if k == 1:
                s = jcoef(e)
            else:
                # j^k = j^{k-1} * j: sum over b >= -1 of j^{k-1}[e-b] * j[b]
                for b in range(-1, e + k):
                    a = e - b
                    if -(k - 1) <= a <= U(k - 1):
                        s += prev[a + (k - 1)] * jcoef(b)
            w.append(s)
        pow_w[k] = w
        prev = w

    def jpow_coef(k, e):
        if e < -k or e > U(k):
            return 0
        return pow_w[k][e + k]

    # power-sum series windows over exponents [-pole, 0]
    def power_sum(m):
        # d_N = coeff of x^N in j(x)^m for N in [-m, 2]
        pole = ell * m
        ps = {}
        for t in range(-(m // ell) - 1, 1):
            if -m <= ell * t <= 2:
                ps[t] = ps.get(t, 0) + ell * jpow_coef(m, ell * t)
        for nexp in range(-m, 1):
            e = ell * nexp
            if e >= -pole and e <= 0:
                ps[e] = ps.get(e, 0) + jpow_coef(m, nexp)
        return ps, pole

    def reduce_to_jpoly(ps, pole):
        """Peel series (known on exponents [-pole, 0]) into a polynomial in j."""
        work = dict(ps)
        poly = {}
        for e in range(pole, 0, -1):
            coef = work.get(-e, 0)
            if coef:
                poly[e] = coef
                for ee in range(-e, 1):
                    w = jpow_coef(e, ee)
                    if w:
                        work[ee] = work.get(ee, 0) - coef * w
        poly[0] = work.get(0, 0)
        return poly

    p = {}
    for m in range(1, deg + 1):
        ps, pole = power_sum(m)
        p[m] = reduce_to_jpoly(ps, pole)

    def jp_mul(a, b):
        out = {}
        for da, ca in a.items():
            for db, cb in b.items():
                out[da + db] = out.get(da + db, 0) + ca * cb
        return {k: v for k, v in out.items() if v}

    def jp_axpy(a, s, b):  # a + s*b
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + s * v
        return {k: v for k, v in out.items() if v}

    e = {0: {0: 1}}
    for m in range(1, deg + 1):
        acc = {}
        sign = 1
        for i in range(1, m + 1):
            acc = jp_axpy(acc, sign, jp_mul(e[m - i], p[i]))
            sign = -sign
        em = {}
        for k, v in acc.items():
            q, r = divmod(v, m)
            assert r == 0, f"Newton identity non-integral at l={ell}, m={m}"
            em[k] = q
        assert max(em, default=0) <= deg, f"e_{m} degree overflow at l={ell}"
        e[m] = em

    grid = {}
    for m in range(0, deg + 1):
        xdeg = deg - m
        sign = (-1) ** m
        for jdeg, v in e[m].items():
            grid[(xdeg, jdeg)] = grid.get((xdeg, jdeg), 0) + sign * v
    grid = {k: v for k, v in grid.items() if v}

    for (i, k), v in grid.items():
        assert grid.get((k, i), 0) == v, f"asymmetric grid at l={ell}: {(i, k)}"
    assert max(i for i, _ in grid) == deg
    return grid


def verify_series_identity(ell, grid, terms=40):
    P = (1 << 61) - 1  # Mersenne prime
    n = ell * (ell + 2) + terms
    c = j_coefficients(n + 2)
    nn = len(c)

    def red(a):
        return [x % P for x in a]

    j1 = red(c)  # exponent offset -1
    j2 = [0] * (ell * nn)
    for i, x in enumerate(c):
        j2[i * ell] = x % P  # j(q^l), offset -l
    # accumulate Phi(j1, j2) with exponent offset -(l+1)*l... use dict of offsets
    deg = ell + 1
    pow1 = {0: ([1], 0)}
    pow2 = {0: ([1], 0)}
    L = ell * (ell + 2) + terms  # coefficients to carry

    def smul(a, b):
        out = [0] * min(L, len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0 or i >= len(out):
                continue
            top = min(len(out) - i, len(b))
            for jj in range(top):
                out[i + jj] = (out[i + jj] + x * b[jj]) % P
        return out

    for k in range(1, deg + 1):
        a, off = pow1[k - 1]
        pow1[k] = (smul(a, j1[:L]), off - 1)
        a, off = pow2[k - 1]
        pow2[k] = (smul(a, j2[:L]), off - ell)

    total_off = -deg * ell - deg
    acc = [0] * L
    for (i, k), v in grid.items():
        a, offa = pow1[i]
        b, offb = pow2[k]
        term = smul(a, b)
        shift = (offa + offb) - total_off
        for t, x in enumerate(term):
            if t + shift < L:
                acc[t + shift] = (acc[t + shift] + v * x) % P
    bad = [t for t, x in enumerate(acc) if x]
    assert not bad, f"Phi_{ell}(j(q), j(q^{ell})) != 0 at offsets {bad[:5]}"


def main():
    out_path = Path(__file__).resolve().parents[1] / "src" / "ssforms" / "data" / "modular_polynomials.txt"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# classical modular polynomials Phi_l(x, y); lines: l i k c with i >= k", "# format-version 1"]
    for ell in LEVELS:
        print(f"computing Phi_{ell} ...", flush=True)
        grid = make_phi(ell)
        if ell == 2:
            flat = {k: v for k, v in grid.items() if k[0] >= k[1]}
            assert flat == CLASSICAL_PHI2, f"Phi_2 mismatch: {flat}"
            print("  Phi_2 matches the classical coefficients")
        verify_series_identity(ell, grid)
        print(f"  series identity verified for Phi_{ell}")
        for (i, k) in sorted(grid):
            if i >= k:
                lines.append(f"{ell} {i} {k} {grid[(i, k)]}")
    data = "\n".join(lines) + "\n"
    out_path.write_text(data)
    digest = hashlib.sha256(data.encode()).hexdigest()
    print(f"wrote {out_path} ({len(data)} bytes)")
    print(f"sha256 {digest}")


if __name__ == "__main__":
    sys.exit(main())
