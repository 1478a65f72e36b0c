"""Boundary-corrected Daubechies wavelet bases on [0,1].

Filters are generated at build time rather than read from published tables.
The interior filter comes from spectral factorization in high precision.
Edge scaling functions start from binomial combinations of scaling-function
translates clipped to the interval; their Gram matrix is computed exactly
from the fixed-point linear system the refinement relation imposes on
clipped-translate inner products, and a staggered Gram-Schmidt (boundary
inward) orthonormalizes them.  Edge wavelets complete the two-scale
synthesis map to an orthogonal one.  All discrete transforms built here are
orthogonal to rounding error.

Index conventions: the interior filter h[i] lives on offsets t = i - p + 1
for t = -p+1 .. p, so the scaling function has support [-p+1, p] and the
translate phi(. - s) at level j is interior to [0,1] exactly when
p-1 <= s <= 2^j - p.  Basis order within a level is p left-edge functions,
interior translates s = p .. 2^j - p - 1, then p right-edge functions
mirrored; the translates s = p-1 and s = 2^j - p flush against the edges
are the two dropped interior functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_SUPPORTED_ORDERS = (1, 3, 4, 5, 6, 7, 8, 9, 10)


def _edge_dps(p):
    # the clipped-translate system loses roughly kappa ~ (binomial growth)
    # digits for large p; generous working precision keeps the rounded
    # filters exact to double
    return 50 + 12 * p


def _daubechies_mp(p):
    """High-precision extremal-phase filter as a list of mpmath floats."""
    import mpmath as mp

    if p == 1:
        with mp.workdps(_edge_dps(p)):
            r = 1 / mp.sqrt(2)
            return [r, r]
    with mp.workdps(_edge_dps(p)):
        # z^(p-1) * P((2 - z - 1/z) / 4) as an ordinary polynomial, where
        # P(y) = sum_k binom(p-1+k, k) y^k is the Daubechies polynomial
        poly = [mp.mpf(0)] * (2 * p - 1)
        for k in range(p):
            c = mp.binomial(p - 1 + k, k) / mp.mpf(4) ** k
            for m in range(-k, k + 1):
                s = mp.mpf(0)
                for a in range(k + 1):
                    b = a + m
                    if 0 <= b <= k - a:
                        s += (
                            mp.binomial(k, a)
                            * mp.binomial(k - a, b)
                            * mp.mpf(2) ** (k - a - b)
                            * (-1) ** (a + b)
                        )
                poly[m + p - 1] += c * s
        roots = mp.polyroots(
            [poly[i] for i in range(2 * p - 2, -1, -1)], maxsteps=2000, extraprec=200
        )
        inside = [r for r in roots if abs(r) < 1]
        if len(inside) != p - 1:
            raise RuntimeError("spectral factorization failed to split root pairs")
        # sqrt(2) * ((1+z)/2)^p * prod (z - r_i)/(1 - r_i), extremal phase
        coeffs = [mp.mpf(1)]
        for r in inside:
            nxt = [mp.mpf(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] += c
                nxt[i] -= r * c
            coeffs = nxt
        norm = mp.mpf(1)
        for r in inside:
            norm *= 1 - r
        coeffs = [c / norm for c in coeffs]
        binom = [mp.binomial(p, i) / mp.mpf(2) ** p for i in range(p + 1)]
        h = [mp.mpf(0)] * (2 * p)
        for i, c in enumerate(coeffs):
            for j, b in enumerate(binom):
                h[i + j] += c * b
        # the inside-circle factor yields the reversed extremal-phase filter
        out = [mp.re(mp.sqrt(2) * x) for x in h][::-1]
    return out


def daubechies_filter(p):
    """Orthonormal Daubechies (extremal phase) scaling filter of order p.

    Returns the length-2p filter normalized so that sum(h) = sqrt(2),
    computed by spectral factorization in high precision and rounded to
    double.  Index i corresponds to offset t = i - p + 1.
    """
    if p not in _SUPPORTED_ORDERS:
        raise ValueError(f"unsupported wavelet order {p} (allowed: {_SUPPORTED_ORDERS})")
    return np.array([float(x) for x in _daubechies_mp(p)])


def wavelet_filter_from_scaling(h):
    """Alternating flip g[t] = (-1)^t h[1-t] on the centered window."""
    p = h.size // 2
    g = np.empty_like(h)
    for i in range(h.size):
        t = i - p + 1
        g[i] = (-1) ** (t & 1) * h[(1 - t) + p - 1]
    return g


def _clipped_translate_gram(h, mp):
    """Inner products of scaling-function translates clipped to [0, inf).

    h is a high-precision filter (list of mpf).  Returns a lookup
    gamma(u, v), exact on the crossing range by solving the linear
    fixed-point system the refinement relation imposes (double-precision
    solve plus high-precision iterative refinement), and reducing to
    delta / zero outside it.
    """
    p = len(h) // 2
    crossing = list(range(-p + 1, p - 1))
    nc = len(crossing)
    idx = {m: i for i, m in enumerate(crossing)}
    zero, one = mp.mpf(0), mp.mpf(1)

    def base(u, v):
        # dead translates vanish on the half line, interior ones are orthonormal
        if u <= -p or v <= -p:
            return zero
        if u >= p - 1 or v >= p - 1:
            return one if u == v else zero
        return None

    values = [[zero] * nc for _ in range(nc)]
    if nc:
        taps = [(t, h[t + p - 1]) for t in range(-p + 1, p + 1)]
        taps_f = [(t, float(x)) for t, x in taps]
        n = nc * nc
        a = np.eye(n)
        rhs = np.zeros(n)
        for m in crossing:
            for m2 in crossing:
                row = idx[m] * nc + idx[m2]
                for ta, ha in taps_f:
                    for tb, hb in taps_f:
                        u, v = 2 * m + ta, 2 * m2 + tb
                        known = base(u, v)
                        if known is None:
                            a[row, idx[u] * nc + idx[v]] -= ha * hb
                        elif known:
                            rhs[row] += ha * hb
        ainv = np.linalg.inv(a)
        x = ainv @ rhs
        for i, m in enumerate(crossing):
            for j, m2 in enumerate(crossing):
                values[i][j] = mp.mpf(x[i * nc + j])

        def lookup(u, v):
            known = base(u, v)
            return values[idx[u]][idx[v]] if known is None else known

        # iterative refinement: each pass regains full double accuracy on
        # the residual, so a few passes reach the working precision
        for _ in range(4):
            resid = np.empty(n)
            res_mp = {}
            for m in crossing:
                for m2 in crossing:
                    acc = -lookup(m, m2)
                    for ta, ha in taps:
                        for tb, hb in taps:
                            acc += ha * hb * lookup(2 * m + ta, 2 * m2 + tb)
                    res_mp[(m, m2)] = acc
                    resid[idx[m] * nc + idx[m2]] = float(acc)
            corr = ainv @ resid
            for i, m in enumerate(crossing):
                for j, m2 in enumerate(crossing):
                    values[i][j] += mp.mpf(corr[i * nc + j])

    def gamma(u, v):
        known = base(u, v)
        if known is not None:
            return known
        return values[idx[u]][idx[v]]

    return gamma


def _edge_system(h, mp):
    """Left-edge construction for a centered high-precision filter.

    Returns (D, HL) as float arrays.  D is p x (2p-1): expansion of the
    orthonormal edge scaling functions in clipped translates
    s = -p+1 .. p-1 at their own level.  HL is the p x (3p-1) refinement
    block: columns 0..p-1 target the finer-level edge functions, columns
    p..3p-2 the finer interior translates u = p..3p-2.
    """
    p = len(h) // 2
    gamma = _clipped_translate_gram(h, mp)
    shifts = list(range(-p + 1, p))
    ns = len(shifts)
    zero = mp.mpf(0)
    cand = [[zero] * ns for _ in range(p)]
    for k in range(p):
        for i, s in enumerate(shifts):
            n = p - 1 - s
            if n >= k:
                cand[k][i] = mp.mpf(math.comb(n, k))
    gram_t = [[gamma(s, s2) for s2 in shifts] for s in shifts]

    def dot_t(a, b):
        return mp.fsum(
            a[i] * gram_t[i][j] * b[j] for i in range(ns) for j in range(ns)
        )

    # staggered orthonormalization from the boundary inward (k = p-1 first)
    d = [None] * p
    done = []
    for k in range(p - 1, -1, -1):
        v = list(cand[k])
        for _ in range(2):
            for w in done:
                c = dot_t(w, v)
                v = [v[i] - c * w[i] for i in range(ns)]
            nrm = mp.sqrt(dot_t(v, v))
            v = [x / nrm for x in v]
        done.append(v)
        d[k] = v

    # refinement onto the finer level
    fine = list(range(-p + 1, 3 * p - 1))
    nf = len(fine)
    pos = {u: i for i, u in enumerate(fine)}
    chat = [[zero] * nf for _ in range(p)]
    for k in range(p):
        for i, s in enumerate(shifts):
            for t in range(-p + 1, p + 1):
                u = 2 * s + t
                if u >= -p + 1:
                    chat[k][pos[u]] += d[k][i] * h[t + p - 1]
    gram_fine = [[gamma(u, v) for v in fine] for u in fine]
    d_fine = [list(row) + [zero] * (nf - ns) for row in d]

    def dot_f(a, b):
        return mp.fsum(
            a[i] * gram_fine[i][j] * b[j] for i in range(nf) for j in range(nf)
        )

    he = [[dot_f(chat[k], d_fine[k2]) for k2 in range(p)] for k in range(p)]
    hl = np.zeros((p, 3 * p - 1))
    residual_worst = 0.0
    for k in range(p):
        for k2 in range(p):
            hl[k, k2] = float(he[k][k2])
        for u in range(p, 3 * p - 1):
            hl[k, u] = float(chat[k][pos[u]])
        # the edge block plus kept interior translates must absorb everything
        res = (
            dot_f(chat[k], chat[k])
            - mp.fsum(he[k][k2] ** 2 for k2 in range(p))
            - mp.fsum(chat[k][pos[u]] ** 2 for u in range(p, 3 * p - 1))
        )
        residual_worst = max(residual_worst, abs(float(res)))
    if residual_worst > 1e-18:
        raise RuntimeError("edge refinement does not close; construction invalid")
    d_out = np.array([[float(x) for x in row] for row in d])
    return d_out, hl


def _complete_orthonormal(q, scan_order, count):
    """Deterministic completion of orthonormal columns by residual sweeps."""
    found = []
    for i in scan_order:
        r = np.zeros(q.shape[0])
        r[i] = 1.0
        for _ in range(2):  # two modified Gram-Schmidt passes
            r -= q @ (q.T @ r)
            for w in found:
                r -= w * (w @ r)
        nrm = np.linalg.norm(r)
        if nrm > 1e-6:
            r /= nrm
            lead = np.flatnonzero(np.abs(r) > 1e-10)[0]
            if r[lead] < 0:
                r = -r
            found.append(r)
            if len(found) == count:
                return found
    raise RuntimeError("orthonormal completion failed to find enough vectors")


@dataclass
class WaveletBasis:
    """Orthonormal boundary-corrected Daubechies basis of order p on [0,1].

    Valid from the minimal level J0 (2^J0 >= 2p-1) upward.  Levels so small
    that the two edge regions share finer-level translates get a dedicated
    orthonormal completion of their wavelet space, cached per level size.
    """

    p: int
    J0: int
    h: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    HL: np.ndarray = field(repr=False)
    HR: np.ndarray = field(repr=False)
    GL: np.ndarray = field(repr=False)
    GR: np.ndarray = field(repr=False)
    edge_expansion_left: np.ndarray = field(repr=False)
    edge_expansion_right: np.ndarray = field(repr=False)
    _small_wavelets: dict = field(default_factory=dict, repr=False)

    @property
    def filter_width(self):
        return 3 * self.p - 1

    def _check_level(self, n0):
        if n0 == 1 and self.p == 1:
            return
        if n0 < 2 * self.p:
            raise ValueError(f"level size {n0} below minimum 2p = {2 * self.p}")

    # -- structured two-scale applications ---------------------------------

    def scaling_synthesis(self, c):
        """Apply the level -> level+1 scaling map to coefficients c."""
        c = np.asarray(c, dtype=float)
        n0 = c.size
        self._check_level(n0)
        p, w = self.p, self.filter_width
        if n0 == 1:
            return self.h * c[0]
        out = np.zeros(2 * n0)
        out[:w] = self.HL.T @ c[:p]
        out[2 * n0 - w :] += self.HR[:, ::-1].T @ c[n0 - p :][::-1]
        if n0 > 2 * p:
            mid = c[p : n0 - p]
            for i, tap in enumerate(self.h):
                t = i - p + 1
                out[2 * p + t : 2 * (n0 - p) + t : 2] += tap * mid
        return out

    def scaling_analysis(self, v):
        """Transpose of scaling_synthesis (level+1 -> level)."""
        v = np.asarray(v, dtype=float)
        n1 = v.size
        n0 = n1 // 2
        self._check_level(n0)
        p, w = self.p, self.filter_width
        if n0 == 1:
            return np.array([self.h @ v])
        c = np.empty(n0)
        c[:p] = self.HL @ v[:w]
        c[n0 - p :] = (self.HR[:, ::-1] @ v[n1 - w :])[::-1]
        if n0 > 2 * p:
            acc = np.zeros(n0 - 2 * p)
            for i, tap in enumerate(self.h):
                t = i - p + 1
                acc += tap * v[2 * p + t : 2 * (n0 - p) + t : 2]
            c[p : n0 - p] = acc
        return c

    def wavelet_synthesis(self, d):
        """Apply the level -> level+1 wavelet map to coefficients d."""
        d = np.asarray(d, dtype=float)
        n0 = d.size
        self._check_level(n0)
        p, w = self.p, self.filter_width
        if n0 == 1:
            return self.g * d[0]
        out = np.zeros(2 * n0)
        if n0 > 2 * p:
            mid = d[p : n0 - p]
            for i, tap in enumerate(self.g):
                t = i - p + 1
                out[2 * p + t : 2 * (n0 - p) + t : 2] += tap * mid
        if 2 * n0 >= 6 * p - 2:
            out[:w] += self.GL.T @ d[:p]
            out[2 * n0 - w :] += self.GR[:, ::-1].T @ d[n0 - p :][::-1]
        else:
            left, right = self._small_level_wavelets(n0)
            out += left.T @ d[:p]
            out += right.T @ d[n0 - p :][::-1]
        return out

    def wavelet_analysis(self, v):
        """Transpose of wavelet_synthesis (level+1 -> wavelet level)."""
        v = np.asarray(v, dtype=float)
        n1 = v.size
        n0 = n1 // 2
        self._check_level(n0)
        p, w = self.p, self.filter_width
        if n0 == 1:
            return np.array([self.g @ v])
        d = np.zeros(n0)
        if n0 > 2 * p:
            acc = np.zeros(n0 - 2 * p)
            for i, tap in enumerate(self.g):
                t = i - p + 1
                acc += tap * v[2 * p + t : 2 * (n0 - p) + t : 2]
            d[p : n0 - p] = acc
        if 2 * n0 >= 6 * p - 2:
            d[:p] = self.GL @ v[:w]
            d[n0 - p :] = (self.GR[:, ::-1] @ v[n1 - w :])[::-1]
        else:
            left, right = self._small_level_wavelets(n0)
            d[:p] = left @ v
            d[n0 - p :] = (right @ v)[::-1]
        return d

    # -- dense views (small levels, tests, completion) ---------------------

    def scaling_synthesis_matrix(self, n0):
        cols = [self.scaling_synthesis(_unit(n0, i)) for i in range(n0)]
        return np.column_stack(cols)

    def wavelet_synthesis_matrix(self, n0):
        cols = [self.wavelet_synthesis(_unit(n0, i)) for i in range(n0)]
        return np.column_stack(cols)

    def _small_level_wavelets(self, n0):
        if n0 not in self._small_wavelets:
            p = self.p
            s = self.scaling_synthesis_matrix(n0)
            gi = np.zeros((2 * n0, max(n0 - 2 * p, 0)))
            for j, pos in enumerate(range(p, n0 - p)):
                gi[2 * pos - p + 1 : 2 * pos + p + 1, j] = self.g
            q = np.hstack([s, gi])
            left = _complete_orthonormal(q, range(2 * n0), p)
            q2 = np.hstack([q] + [v.reshape(-1, 1) for v in left])
            right = _complete_orthonormal(q2, range(2 * n0 - 1, -1, -1), p)
            self._small_wavelets[n0] = (np.array(left), np.array(right))
        return self._small_wavelets[n0]


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


_FILTER_CACHE = {}


def _filters_for_order(p):
    if p not in _FILTER_CACHE:
        import mpmath as mp

        with mp.workdps(_edge_dps(p)):
            h_mp = _daubechies_mp(p)
            d_left, hl = _edge_system(h_mp, mp)
            d_right, hr = _edge_system(list(reversed(h_mp)), mp)
        h = np.array([float(x) for x in h_mp])
        _FILTER_CACHE[p] = (h, d_left, hl, d_right, hr)
    return _FILTER_CACHE[p]


def build_basis(p, J0):
    """Construct the boundary-corrected basis of order p with minimal level J0.

    Requires 2^J0 >= 2p-1 and p in {1, 3, 4, ..., 10}; for p = 1 the result
    is exactly the Haar system on [0,1].
    """
    if p not in _SUPPORTED_ORDERS:
        raise ValueError(f"unsupported wavelet order {p} (allowed: {_SUPPORTED_ORDERS})")
    if J0 < 0 or (1 << J0) < 2 * p - 1:
        raise ValueError(f"need 2^J0 >= {2 * p - 1} for order {p}, got J0 = {J0}")
    h, d_left, hl, d_right, hr = _filters_for_order(p)
    g = wavelet_filter_from_scaling(h)
    basis = WaveletBasis(
        p=p,
        J0=J0,
        h=h,
        g=g,
        HL=hl,
        HR=hr,
        GL=np.zeros((p, 3 * p - 1)),
        GR=np.zeros((p, 3 * p - 1)),
        edge_expansion_left=d_left,
        edge_expansion_right=d_right,
    )
    # edge wavelet filters from a reference level where the edges decouple
    n_ref = 1 << max(math.ceil(math.log2(4 * p)), 2)
    s = basis.scaling_synthesis_matrix(n_ref)
    gi = np.zeros((2 * n_ref, n_ref - 2 * p))
    for j, pos in enumerate(range(p, n_ref - p)):
        gi[2 * pos - p + 1 : 2 * pos + p + 1, j] = g
    q = np.hstack([s, gi])
    width = 3 * p - 1
    left = _complete_orthonormal(q, range(2 * n_ref), p)
    q2 = np.hstack([q] + [v.reshape(-1, 1) for v in left])
    right = _complete_orthonormal(q2, range(2 * n_ref - 1, -1, -1), p)
    for k in range(p):
        if max(np.max(np.abs(left[k][width:])), np.max(np.abs(right[k][:-width]))) > 1e-11:
            raise RuntimeError("edge wavelet support exceeded the expected window")
        basis.GL[k] = left[k][:width]
        basis.GR[k] = right[k][-width:][::-1]
    return basis


@dataclass(frozen=True)
class LevelStructure:
    """Dyadic level partition of coefficients (M) and samples (N).

    M = (0, 2^(J0+1), ..., 2^(J0+r)); N matches it except that its last
    band extends to 2^(J0+r+q) for an oversampling exponent q >= 0.  The
    first block pairs the level-J0 scaling and wavelet coefficients; block
    k >= 2 is the wavelet level J0 + k - 1.
    """

    J0: int
    r: int
    q: int = 0

    def __post_init__(self):
        if self.J0 < 0 or self.r < 1 or self.q < 0:
            raise ValueError("need J0 >= 0, r >= 1, q >= 0")
        if self.J0 + self.r + self.q > 40:
            raise ValueError("level structure too large")

    @property
    def M(self):
        return np.array([0] + [1 << (self.J0 + k) for k in range(1, self.r + 1)])

    @property
    def N(self):
        n = [0] + [1 << (self.J0 + k) for k in range(1, self.r)]
        n.append(1 << (self.J0 + self.r + self.q))
        return np.array(n)

    @property
    def M_r(self):
        return 1 << (self.J0 + self.r)

    @property
    def N_r(self):
        return 1 << (self.J0 + self.r + self.q)

    def coefficient_level_slice(self, k):
        """Python slice of the k-th coefficient block (1-based k)."""
        m = self.M
        return slice(int(m[k - 1]), int(m[k]))

    def sample_level_slice(self, k):
        n = self.N
        return slice(int(n[k - 1]), int(n[k]))


@dataclass
class SignalExpansion:
    """Coefficients ordered scaling block first, then wavelet levels."""

    levels: LevelStructure
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.levels.M_r,):
            raise ValueError(
                f"expected {self.levels.M_r} coefficients, got {self.coeffs.shape}"
            )

    def scaling_block(self):
        return self.coeffs[: 1 << self.levels.J0]

    def wavelet_level(self, j):
        """Wavelet coefficients at dyadic level j (J0 <= j < J0 + r)."""
        if not self.levels.J0 <= j < self.levels.J0 + self.levels.r:
            raise ValueError(f"level {j} outside expansion range")
        return self.coeffs[1 << j : 1 << (j + 1)]

    def level_block(self, k):
        return self.coeffs[self.levels.coefficient_level_slice(k)]


def dwt_forward(samples, basis, coarsest=None):
    """Full discrete wavelet analysis of cell averages on a dyadic grid.

    Returns a SignalExpansion of L2([0,1]) coefficients: scaling block at
    level `coarsest` (default basis.J0), then wavelet levels up to the grid
    scale.  Exact inverse of dwt_inverse at the same scale.
    """
    v = np.asarray(samples, dtype=float)
    if v.ndim != 1 or v.size == 0 or v.size & (v.size - 1):
        raise ValueError("grid vector length must be a power of two")
    big_q = v.size.bit_length() - 1
    r0 = basis.J0 if coarsest is None else coarsest
    if not basis.J0 <= r0 < big_q:
        raise ValueError("coarsest level must satisfy J0 <= R < Q")
    c = v * 2.0 ** (-big_q / 2.0)
    out = np.empty(v.size)
    for j in range(big_q - 1, r0 - 1, -1):
        out[1 << j : 1 << (j + 1)] = basis.wavelet_analysis(c)
        c = basis.scaling_analysis(c)
    out[: 1 << r0] = c
    return SignalExpansion(levels=LevelStructure(J0=r0, r=big_q - r0), coeffs=out)


def dwt_inverse(expansion, basis, Q):
    """Cell averages at scale Q of the function the expansion represents
    (wavelet levels above the expansion's range are treated as zero)."""
    levels = expansion.levels
    r0 = levels.J0
    top = levels.J0 + levels.r
    if Q < top:
        raise ValueError(f"target scale {Q} below expansion scale {top}")
    c = expansion.coeffs[: 1 << r0].copy()
    for j in range(r0, Q):
        c2 = basis.scaling_synthesis(c)
        if j < top:
            c2 += basis.wavelet_synthesis(expansion.coeffs[1 << j : 1 << (j + 1)])
        c = c2
    return c * 2.0 ** (Q / 2.0)


def cascade_tabulate(basis, j, n, Q, kind="scaling"):
    """Grid-cell averages of one basis function on the 2^Q dyadic grid.

    Iterates the two-scale refinement Q - j times; exact for Haar and
    O(2^-(Q-j)) accurate in sup norm for Lipschitz members away from the
    boundary.  In the p outermost cells at each end the iteration reports
    the fine-level edge coefficients scaled like cell values (the edge
    functions are not averaging kernels), an O(1) pointwise discrepancy of
    O(2^-Q) total mass; integrals, Gram quadrature and Walsh pairings are
    unaffected at the stated rates.
    """
    if Q < j:
        raise ValueError("grid exponent Q must be at least the level j")
    if not 0 <= n < (1 << j):
        raise ValueError(f"shift index {n} out of range at level {j}")
    if kind not in ("scaling", "wavelet"):
        raise ValueError("kind must be 'scaling' or 'wavelet'")
    if basis.p > 1 and (1 << j) < 2 * basis.p:
        raise ValueError(f"level {j} below the basis minimum for p = {basis.p}")
    e = _unit(1 << j, n)
    if kind == "wavelet":
        if Q == j:
            raise ValueError("a level-j wavelet needs grid exponent Q >= j + 1")
        c = basis.wavelet_synthesis(e)
        start = j + 1
    else:
        c = e
        start = j
    for lev in range(start, Q):
        c = basis.scaling_synthesis(c)
    return c * 2.0 ** (Q / 2.0)


def export_filters(basis, path):
    """Write all filters as CSV, one per row, 17 significant digits."""
    rows = [("interior_scaling", basis.h), ("interior_wavelet", basis.g)]
    rows += [(f"left_scaling_{k}", basis.HL[k]) for k in range(basis.p)]
    rows += [(f"right_scaling_{k}", basis.HR[k]) for k in range(basis.p)]
    rows += [(f"left_wavelet_{k}", basis.GL[k]) for k in range(basis.p)]
    rows += [(f"right_wavelet_{k}", basis.GR[k]) for k in range(basis.p)]
    with open(path, "w") as fh:
        for name, values in rows:
            fh.write(name + "," + ",".join(f"{v:.17g}" for v in values) + "\n")


def import_filters(path):
    """Read a filter CSV back into a name -> array mapping."""
    out = {}
    with open(path) as fh:
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) > 1:
                out[parts[0]] = np.array([float(x) for x in parts[1:]])
    return out
