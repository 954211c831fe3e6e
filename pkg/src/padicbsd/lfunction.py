"""The MTT p-adic L-function at a supersingular prime and its signed pieces.

Level-n Riemann sums are assembled exactly in Q(alpha):

    S_n = sum_{a in (Z/p^n)^x} mu_alpha(a + p^n Z_p) (1+X)^{l(a)},
    mu_alpha(a + p^n Z_p) = alpha^{-n} [a/p^n]^+ - alpha^{-n-1} [a/p^{n-1}]^+,

with <a> = kappa(gamma)^{l(a)}, kappa(gamma) = 1 + p.  The distribution
relation makes S_{n+1} = S_n mod ((1+X)^{p^(n-1)} - 1), so S_n determines
L_{p,alpha} exactly at all characters of level <= n; in particular, writing
S_n = A + alpha B with A, B in Q[X]:

    B = L_p^+ * ghat_minus  mod Q_plus,   A = L_p^- * ghat_plus  mod Q_minus,

where Q_plus = X prod_{even m <= n-1} Phi_m(1+X) (resp. Q_minus, odd m) and
ghat_sign is the corresponding finite product of Phi_m(1+X)/p over p (every
omitted cyclotomic factor is congruent to p at the relevant roots of unity).
Reducing mod the monic modulus therefore recovers L_p^{+/-} mod Q_{+/-}
exactly, and the integrality of the signed series turns that polynomial
congruence into per-coefficient p-adic certificates

    L^{sign}_j known mod p^(delta_j),  delta_j = min_{1<=i<=j} v_p([Q_sign]_i),

with the constant coefficients exact.  This is the sharp route the verifier
uses; the generic series division of the logarithm-matrix relation is also
provided (signed_decompose) and cross-checked against it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .padics import PadicElement, PrecisionError, vp_fraction
from .series import TruncatedSeries


class LevelError(ValueError):
    """The requested output is not certified at this level exponent."""


# --- exact polynomial helpers over Fraction (little-endian lists) ---------------

def _ptrim(f):
    while f and f[-1] == 0:
        f = f[:-1]
    return f


def _pmul(f, g):
    if not f or not g:
        return []
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                if gj:
                    out[i + j] += fi * gj
    return out


def _padd(f, g):
    n = max(len(f), len(g))
    return [(f[i] if i < len(f) else Fraction(0))
            + (g[i] if i < len(g) else Fraction(0)) for i in range(n)]


def _pdivmod(f, g):
    f = [Fraction(c) for c in f]
    g = _ptrim([Fraction(c) for c in g])
    q = [Fraction(0)] * max(1, len(f) - len(g) + 1)
    f = _ptrim(f)
    while len(f) >= len(g):
        k = len(f) - len(g)
        c = f[-1] / g[-1]
        q[k] = c
        for i in range(len(g)):
            f[k + i] -= c * g[i]
        f = _ptrim(f[:-1])
    return _ptrim(q), f


def _pgcdext(f, g):
    """(s, t) with s f + t g = gcd = 1 for coprime f, g over Q."""
    r0, r1 = _ptrim(list(f)), _ptrim(list(g))
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, [-c for c in _pmul(q, s1)])
        t0, t1 = t1, _padd(t0, [-c for c in _pmul(q, t1)])
    if len(r0) != 1:
        raise ValueError("polynomials are not coprime")
    c = r0[0]
    return [x / c for x in s0], [x / c for x in t0]


def _cyclotomic_poly(p, m):
    """Phi_m(1+X) as an exact integer-coefficient list (full degree)."""
    deg = p ** m - p ** (m - 1)
    return [Fraction(c) for c in
            (sum(comb(p ** (m - 1) * i, j) for i in range(p)) for j in range(deg + 1))]


# --- level sums -------------------------------------------------------------------

@dataclass
class LevelData:
    """Exact level-n Riemann sum S_n = A + alpha B and its bookkeeping."""

    p: int
    n: int
    A: list                   # Fraction coefficients, degree < p^(n-1)
    B: list
    v_sym2: int               # doubled min valuation over the symbols used
    symbols_used: int


def dlog_table(p, n):
    """Discrete logs base 1+p on 1 + pZ/p^n."""
    out = {}
    x = 1
    g = 1 + p
    mod = p ** n
    for ell in range(p ** (n - 1)):
        out[x] = ell
        x = x * g % mod
    return out


def level_sum(engine, n):
    """Assemble S_n exactly from the engine's snapped modular symbols."""
    p = engine.fixture.p
    if n < 1:
        raise ValueError("level exponent n >= 1 required")
    mod = p ** n
    table = dlog_table(p, n)
    deg = p ** (n - 1)
    A = [Fraction(0)] * deg
    B = [Fraction(0)] * deg
    v2 = 0
    used = 0
    for a in range(1, mod):
        if a % p == 0:
            continue
        mu = engine.mu(p, n, a)
        used += 1
        omega = pow(a, p ** (n - 1), mod)
        princ = a * pow(omega, -1, mod) % mod
        ell = table[princ]
        for j in range(ell + 1):
            c = comb(ell, j)
            if mu.x:
                A[j] += mu.x * c
            if mu.y:
                B[j] += mu.y * c
    levels = {p ** k for k in range(n + 1)} | {1}
    for (_, sm), val in engine.table.items():
        if sm in levels and val != 0:
            v2 = min(v2, 2 * vp_fraction(val, p))
    return LevelData(p, n, A, B, v2, used)


# --- the signed pair ---------------------------------------------------------------

@dataclass
class SignedPair:
    """(f_-, f_+): pairing against M_log recovers (L_{p,alpha}, L_{p,beta})."""

    minus: TruncatedSeries
    plus: TruncatedSeries
    provenance: dict = field(default_factory=dict)

    def round_trip_ok(self, mlog, l_alpha, l_beta):
        """(minus, plus) * M_log = (L_alpha, L_beta) within joint precision."""
        g_alpha, g_beta = mlog.row_times(self.minus_ext(mlog), self.plus_ext(mlog))
        m = min(g_alpha.trunc, l_alpha.trunc)
        for j in range(m):
            if not g_alpha.coeffs[j].agrees_with(l_alpha.coeffs[j]):
                return False
            if not g_beta.coeffs[j].agrees_with(l_beta.coeffs[j]):
                return False
        return True

    def minus_ext(self, mlog):
        return _into_ext(self.minus)

    def plus_ext(self, mlog):
        return _into_ext(self.plus)


def _into_ext(series):
    return series.map_coeffs(
        lambda c: PadicElement.make(c.p, c.a, c.b, c.shift, c.prec2, True), "Qp(s)")


def _to_qp(c):
    """Project an extension element certified real onto Q_p."""
    bpart = (c - c.conjugate()) / 2
    if bpart.valuation().decided:
        raise PrecisionError(
            "nonvanishing imaginary part: inconsistent signed-decomposition input")
    return PadicElement.make(c.p, c.a, 0, c.shift, c.prec2, False)


def omega_moduli(p, n):
    """(Q_plus, Q_minus) = X prod Phi_m(1+X) over even (resp. odd) m <= n-1."""
    qp = [Fraction(0), Fraction(1)]
    qm = [Fraction(0), Fraction(1)]
    for m in range(1, n):
        phi = _cyclotomic_poly(p, m)
        if m % 2 == 0:
            qp = _pmul(qp, phi)
        else:
            qm = _pmul(qm, phi)
    return qp, qm


def ghat_products(p, n):
    """(ghat_plus, ghat_minus): the finite truncations of log^{+/-} mod the moduli."""
    gp = [Fraction(1, p)]
    gm = [Fraction(1, p)]
    for m in range(1, n):
        phi = [c / p for c in _cyclotomic_poly(p, m)]
        if m % 2 == 0:
            gp = _pmul(gp, phi)
        else:
            gm = _pmul(gm, phi)
    return gp, gm


def _delta_profile(qpoly, p):
    """delta_j = min_{1<=i<=j} v_p of the modulus coefficients, doubled, for
    j = 0..deg-1; None marks an exact coefficient (delta_0 always, since the
    modulus is divisible by X)."""
    deg = len(qpoly) - 1
    out = [None]
    cur = None
    for i in range(1, deg):
        c = qpoly[i]
        if c != 0:
            v = 2 * vp_fraction(c, p)
            cur = v if cur is None else min(cur, v)
        out.append(cur)
    return out


def signed_from_level(engine, n, prec2, level=None):
    """Certified SignedPair from the exact level-n sum (the sharp pipeline).

    Returns the pair with per-coefficient precision p^(delta_j) (constant
    coefficients exact at the working precision), the exact representative
    polynomials, and an integrality report.
    """
    p = engine.fixture.p
    ld = level or level_sum(engine, n)
    qp, qm = omega_moduli(p, n)
    gp, gm = ghat_products(p, n)
    reps = {}
    deltas = {}
    w_adjust = {}
    for sign, (data, modulus, ghat) in (("+", (ld.B, qp, gm)),
                                        ("-", (ld.A, qm, gp))):
        _, ghat_red = _pdivmod(ghat, modulus)
        s, t = _pgcdext(ghat_red if ghat_red else ghat, modulus)
        prod = _pmul(data, s)
        _, rep = _pdivmod(prod, modulus)
        rep = rep + [Fraction(0)] * (len(modulus) - 1 - len(rep))
        reps[sign] = rep
        deltas[sign] = _delta_profile(modulus, p)
        # integrality adjustment: if the representative is non-integral the
        # Weierstrass-division certificate weakens by the denominator
        w = 0
        for c in rep:
            if c != 0:
                w = min(w, 2 * vp_fraction(c, p))
        w_adjust[sign] = w
    series = {}
    for sign in "+-":
        rep, dl, w = reps[sign], deltas[sign], w_adjust[sign]
        coeffs = []
        for j, c in enumerate(rep):
            if dl[j] is None:
                cap = prec2
            else:
                cap = max(0, min(prec2, dl[j] + w))
            coeffs.append(PadicElement.from_rational(p, c, cap))
        series[sign] = TruncatedSeries.make(coeffs, len(rep), "Qp")
    prov = {
        "level": n,
        "scheme": "omega-moduli-reduction",
        "v_sym2": ld.v_sym2,
        "integral_plus": w_adjust["+"] == 0,
        "integral_minus": w_adjust["-"] == 0,
        "delta_plus2": [d for d in deltas["+"]],
        "delta_minus2": [d for d in deltas["-"]],
    }
    return SignedPair(series["-"], series["+"], prov), reps


def lp_alpha(engine, n, M, prec2):
    """L_{p,alpha} as a truncated series over Q_p(s) from the level-n sum.

    Per-coefficient precision follows the telescoped Riemann-sum bound:
    coefficient 0 is exact (the distribution relation fixes it), coefficient
    j >= 1 is certified to (n-4)/2 - v_p(floor) + v_sym digits.  Requests
    beyond the level's reach (M > p^(n-1) or more digits than certified)
    are refused with the required level.
    """
    p = engine.fixture.p
    if M > p ** (n - 1):
        need = n
        while M > p ** (need - 1):
            need += 1
        raise LevelError(f"truncation {M} needs level exponent n >= {need}")
    ld = level_sum(engine, n)
    coeffs = []
    for j in range(M):
        qa = ld.A[j] if j < len(ld.A) else Fraction(0)
        qb = ld.B[j] if j < len(ld.B) else Fraction(0)
        if j == 0:
            cap = prec2
        else:
            big_v = 0
            while p ** (big_v + 1) <= j:
                big_v += 1
            cap = max(0, min(prec2, (n - 4) - 2 * big_v + ld.v_sym2))
        coeffs.append(PadicElement.from_pair(p, qa, qb, cap + 4).cap_precision(cap))
    prov = {"level": n, "v_sym2": ld.v_sym2}
    return TruncatedSeries.make(coeffs, M, "Qp(s)"), ld, prov


def lp_beta(series_alpha):
    """The conjugate series (the construction is Galois-equivariant)."""
    return series_alpha.map_coeffs(lambda c: c.conjugate())


def signed_decompose(l_alpha, l_beta, mlog):
    """Solve (f_-, f_+) M_log = (L_alpha, L_beta) by truncated series division.

    L_p^+ = (L_alpha - L_beta) / ((alpha - beta) log^-),
    L_p^- = (beta L_alpha - alpha L_beta) / ((beta - alpha) log^+);
    inputs must be coefficientwise conjugate, outputs certified real.
    """
    for ca, cb in zip(l_alpha.coeffs, l_beta.coeffs):
        if not cb.agrees_with(ca.conjugate()):
            raise PrecisionError("L_beta is not the coefficientwise conjugate "
                                 "of L_alpha")
    alpha = mlog.alpha
    beta = -alpha
    two_alpha = alpha - beta
    diff = l_alpha - l_beta
    plus_ext = diff.scalar_mul(two_alpha.inverse()).divide(mlog.minus)
    num = l_alpha.scalar_mul(beta) - l_beta.scalar_mul(alpha)
    minus_ext = num.scalar_mul((-two_alpha).inverse()).divide(mlog.plus)
    minus = minus_ext.map_coeffs(_to_qp, "Qp")
    plus = plus_ext.map_coeffs(_to_qp, "Qp")
    return SignedPair(minus, plus, {"scheme": "series-division"})
