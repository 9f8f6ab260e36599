"""Supersingular ell-isogeny graphs over F_{p^2} and their Atkin-Lehner split.

The graph is explored breadth-first from a CM starting vertex, finding the
roots of the classical modular polynomial Phi_ell(j, y) at each step and
reusing the known backward root to drop one degree.  Rows at Galois-conjugate
vertices are filled by conjugating, never recomputed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import gf
from .linalg import SparseSignedMatrix

BUNDLED_LEVELS = (2, 3, 5, 7, 11, 13)

_MODPOLY_SHA256 = "9f6f7ff4e5927fa529dd254263871b264c568b10323e28faf3c2e2613ecb316e"

# The thirteen class-number-one CM pairs (discriminant, j-invariant), by |D|.
# j mod p is supersingular whenever D is a non-square mod p.
CM_PAIRS = (
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-12, 54000),
    (-16, 287496),
    (-19, -884736),
    (-27, -12288000),
    (-28, 16581375),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
)


class GraphError(RuntimeError):
    pass


_modpoly_cache: dict[int, dict[tuple[int, int], int]] | None = None


def bundled_modular_polynomials() -> dict[int, dict[tuple[int, int], int]]:
    """Symmetric integer coefficient grids of Phi_ell for the bundled ells.

    The data file carries only i >= k monomials; the checksum and structural
    shape are verified on first load and a failure aborts.
    """
    global _modpoly_cache
    if _modpoly_cache is not None:
        return _modpoly_cache
    text = resources.files("ssforms.data").joinpath("modular_polynomials.txt").read_text()
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != _MODPOLY_SHA256:
        raise GraphError(f"modular polynomial table checksum mismatch: {digest}")
    table: dict[int, dict[tuple[int, int], int]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        ell_s, i_s, k_s, c_s = line.split()
        ell, i, k, c = int(ell_s), int(i_s), int(k_s), int(c_s)
        grid = table.setdefault(ell, {})
        grid[(i, k)] = c
        if i != k:
            grid[(k, i)] = c
    for ell in BUNDLED_LEVELS:
        grid = table.get(ell)
        if grid is None:
            raise GraphError(f"Phi_{ell} missing from table")
        deg = max(i for i, _ in grid)
        if deg != ell + 1 or max(k for _, k in grid) != ell + 1:
            raise GraphError(f"Phi_{ell} has wrong degree")
        if grid.get((ell + 1, 0)) != 1:
            raise GraphError(f"Phi_{ell} is not monic in x")
    _modpoly_cache = table
    return table


def supersingular_count(p: int) -> int:
    if p < 5:
        raise ValueError("level must be at least 5")
    eps = {1: 0, 5: 1, 7: 1, 11: 2}[p % 12]
    return p // 12 + eps


def _curve_from_j(p: int, j: int) -> tuple[int, int]:
    """Short Weierstrass coefficients (a, b) of a curve with j-invariant j."""
    j %= p
    if j == 0:
        return 0, 1
    if j == 1728 % p:
        return 1, 0
    k = j * pow((1728 - j) % p, -1, p) % p
    return 3 * k % p, 2 * k % p


def _point_count(p: int, a: int, b: int, chi: np.ndarray) -> int:
    x = np.arange(p, dtype=np.int64)
    vals = (x * x % p * x + a * x + b) % p
    return int(p + 1 + chi[vals].sum())


def _legendre_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int64)
    sq = np.arange(p, dtype=np.int64)
    chi[sq * sq % p] = 1
    chi[0] = 0
    return chi


def _fallback_scan(p: int) -> int:
    """Scan j in F_p for a supersingular j-invariant by brute point count."""
    chi = _legendre_table(p)
    for j in range(p):
        a, b = _curve_from_j(p, j)
        if _point_count(p, a, b, chi) == p + 1:
            return j
    raise GraphError(f"no rational supersingular j-invariant found for p={p}")


def find_starting_j(p: int) -> int:
    """First CM j-invariant whose discriminant is a non-square mod p, with a
    brute-force point-counting scan as the (rare) fallback."""
    if p < 5:
        raise ValueError("level must be at least 5")
    for d, j in CM_PAIRS:
        if pow(d % p, (p - 1) // 2, p) != 1:
            return j % p
    return _fallback_scan(p)


@dataclass
class SupersingularSet:
    p: int
    ctx: gf.QuadExtCtx
    vertices: list[tuple[int, int]]
    conj: np.ndarray  # conj[i] = index of vertices[i]^sigma

    def __len__(self) -> int:
        return len(self.vertices)

    def rational_mask(self) -> np.ndarray:
        return self.conj == np.arange(len(self.vertices))


class _PhiEvaluator:
    """Phi_ell(j, y) as a polynomial in y over F_{p^2}, for varying j."""

    def __init__(self, ell: int, ctx: gf.QuadExtCtx):
        grid = bundled_modular_polynomials()[ell]
        self.ell = ell
        self.ctx = ctx
        p = ctx.p
        deg = ell + 1
        # rows[k][i] = coefficient of y^k x^i, reduced mod p
        self.rows = [
            [grid.get((i, k), 0) % p for i in range(deg + 1)] for k in range(deg + 1)
        ]

    def at(self, j) -> list:
        ctx = self.ctx
        deg = self.ell + 1
        powers = [ctx.one]
        for _ in range(deg):
            powers.append(ctx.mul(powers[-1], j))
        out = []
        for k in range(deg + 1):
            acc = ctx.zero
            row = self.rows[k]
            for i, c in enumerate(row):
                if c:
                    acc = ctx.add(acc, ctx.mul(ctx.embed(c), powers[i]))
            out.append(acc)
        return gf.poly_trim(out, ctx)


def build_adjacency(p: int, ell: int, rng,
                    start_j: int | None = None) -> tuple[SupersingularSet, np.ndarray]:
    """Explore the supersingular ell-isogeny graph; B[i][k] = multiplicity of
    vertex k among the roots of Phi_ell(j_i, y).  Vertices are ordered by
    discovery, with the Galois conjugate of each new vertex inserted
    immediately after it."""
    if ell == p:
        raise ValueError("ell must differ from p")
    count = supersingular_count(p)
    ctx = gf.QuadExtCtx(gf.PrimeFieldCtx(p))
    phi = _PhiEvaluator(ell, ctx)

    j0 = ctx.embed(find_starting_j(p) if start_j is None else start_j)
    vertices: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    conj: list[int] = []

    def add_vertex(j) -> int:
        i = len(vertices)
        vertices.append(j)
        index[j] = i
        js = ctx.conj(j)
        if js == j:
            conj.append(i)
        else:
            vertices.append(js)
            index[js] = i + 1
            conj.append(i + 1)
            conj.append(i)
        return i

    add_vertex(j0)
    B = np.zeros((count, count), dtype=np.int64)
    queue = [(0, None)]  # (vertex index, known backward root or None)
    head = 0
    while head < len(queue):
        vi, back = queue[head]
        head += 1
        j = vertices[vi]
        f = phi.at(j)
        if back is not None:
            f, rem = gf.poly_divrem(f, [ctx.neg(back), ctx.one], ctx)
            if rem:
                raise GraphError("backward root is not a root; arithmetic bug")
        roots = gf.poly_roots(f, ctx, rng)
        if back is not None:
            roots.append(back)
        if len(roots) != ell + 1:
            raise GraphError(
                f"vertex {j} has {len(roots)} of {ell + 1} isogenies in F_p^2; "
                "non-supersingular start or arithmetic bug"
            )
        for r in roots:
            k = index.get(r)
            if k is None:
                if len(vertices) >= count:
                    raise GraphError("graph exceeded the supersingular count")
                k = add_vertex(r)
                queue.append((k, j))
                kc = conj[k]
                if kc != k:
                    queue.append((kc, ctx.conj(j)))
            if B.shape[0] <= max(vi, k):
                raise GraphError("index overflow")
            B[vi][k] += 1
    if len(vertices) != count:
        raise GraphError(
            f"BFS found {len(vertices)} vertices, expected {count} "
            f"(p={p}, ell={ell}); non-supersingular start or arithmetic bug"
        )
    return SupersingularSet(p, ctx, vertices, np.array(conj, dtype=np.int64)), B


@dataclass
class ALSplitMatrices:
    plus: SparseSignedMatrix
    minus: SparseSignedMatrix
    plus_orbits: list[tuple[int, int]]   # (i, conj_i) with i < conj_i
    minus_orbits: list[tuple[int, int]]  # (i, conj_i) with i <= conj_i


def split_atkin_lehner(B: np.ndarray, sset: SupersingularSet) -> ALSplitMatrices:
    """Matrices of the operator in the Galois-invariant basis
    {e_j + e_{j^sigma}} (minus block, all orbits) and the anti-invariant
    basis {e_j - e_{j^sigma}} (plus block, non-rational orbits only)."""
    conj = sset.conj
    n = len(sset)
    minus_orbits = [(i, int(conj[i])) for i in range(n) if i <= conj[i]]
    plus_orbits = [(i, int(conj[i])) for i in range(n) if i < conj[i]]
    mi = {o[0]: t for t, o in enumerate(minus_orbits)}
    pi = {o[0]: t for t, o in enumerate(plus_orbits)}

    minus = np.zeros((len(minus_orbits), len(minus_orbits)), dtype=np.int64)
    for (j1, j1c) in minus_orbits:
        r = mi[j1]
        row = B[j1] if j1 == j1c else B[j1] + B[j1c]
        for (j2, j2c) in minus_orbits:
            minus[r][mi[j2]] = row[j2]
    plus = np.zeros((len(plus_orbits), len(plus_orbits)), dtype=np.int64)
    for (j1, j1c) in plus_orbits:
        r = pi[j1]
        row = B[j1] - B[j1c]
        for (j2, j2c) in plus_orbits:
            plus[r][pi[j2]] = row[j2]
    return ALSplitMatrices(
        plus=SparseSignedMatrix.from_dense(plus),
        minus=SparseSignedMatrix.from_dense(minus),
        plus_orbits=plus_orbits,
        minus_orbits=minus_orbits,
    )


# ---------------------------------------------------------------------------
# Graph cache files: exact integer text format.
# ---------------------------------------------------------------------------


def graph_to_text(sset: SupersingularSet, B: np.ndarray) -> str:
    lines = [f"{sset.p} {len(sset)}"]
    for (a, b) in sset.vertices:
        lines.append(f"{a} {b}")
    nz = np.nonzero(B)
    for i, k in zip(*nz):
        lines.append(f"{i} {k} {B[i][k]}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> tuple[SupersingularSet, np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    p, count = map(int, lines[0].split())
    ctx = gf.QuadExtCtx(gf.PrimeFieldCtx(p))
    vertices = []
    for ln in lines[1 : 1 + count]:
        a, b = map(int, ln.split())
        vertices.append((a, b))
    index = {v: i for i, v in enumerate(vertices)}
    conj = np.array([index[ctx.conj(v)] for v in vertices], dtype=np.int64)
    B = np.zeros((count, count), dtype=np.int64)
    for ln in lines[1 + count :]:
        i, k, c = map(int, ln.split())
        B[i][k] = c
    return SupersingularSet(p, ctx, vertices, conj), B
