"""Modular symbols [a/m]^+ by numerical Eichler-Shimura integration.

For the newform f attached to the curve, lambda(r) = 2 pi i int_r^{i oo} f.
Writing P(z) = sum_k (a_k/k) e^{2 pi i k z} (so 2 pi i int_z^{i oo} f = -P(z)),
a cusp a/m with gcd(m, N) = 1 is evaluated through the Fricke involution
W_N z = -1/(Nz), with Fricke eigenvalue eps determined numerically:

    lambda(a/m) = eps * [lambda(-m/(Na)) + P(W z*)] - P(z*),
    z* = (a + i|a|)/m,

which balances the two integration heights, and the leftover cusp -m/(Na)
has denominator divisible by N, hence equals a Gamma_0(N)-period

    lambda(A/C) = P(z0) - P(gamma z0),  gamma = [[A,B],[C,D]] in Gamma_0(N).

Periods lie in the period lattice, so they are evaluated fast in double
precision and snapped to exact lattice coordinates (verified at a second
base point); the two P-evaluations at z*, W z* run at full precision.  The
real part of lambda divided by the real period is snapped to an exact
rational under a denominator bound by continued fractions, and every snap is
re-verified at higher precision.  Snapped tables are cached on disk (atomic
write-then-rename) keyed by a digest of the parameters.
"""

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from math import ceil, gcd, log, pi

import gmpy2
import numpy as np

from .curves import period_lattice, q_expansion


class SymbolError(ArithmeticError):
    pass


class RationalRecognitionError(SymbolError):
    """A float refused to snap to a bounded-denominator rational."""


def _terms_for(height, digits):
    return int(ceil(digits * log(10) / (2 * pi * height))) + 12


class ModularSymbolEngine:
    """Evaluates and caches the even modular symbols [a/m]^+ of one curve."""

    def __init__(self, fixture, digits=32, cache_dir=None, use_cache=True):
        self.fixture = fixture
        self.curve = fixture.curve
        self.N = fixture.conductor
        self.digits = digits
        self.table = {}
        self.cache_dir = cache_dir
        self.use_cache = use_cache
        self._coeffs = []
        self._lattice = None
        self._eps = None
        self._lambda0 = None
        self._loaded = False

    # -- parameters and cache --

    def denominator_bound(self, m):
        return 2 * self.fixture.torsion_order ** 2 * m * self.N

    def params_digest(self):
        blob = json.dumps({
            "label": self.fixture.label,
            "a_invariants": self.fixture.a_invariants,
            "digits": self.digits,
            "scheme": "fricke-period-v1",
        }, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def _cache_path(self):
        return os.path.join(self.cache_dir,
                            f"msym_{self.fixture.label}_{self.params_digest()}.json")

    def load_cache(self):
        self._loaded = True
        if not (self.use_cache and self.cache_dir):
            return
        path = self._cache_path()
        if not os.path.exists(path):
            return
        with open(path) as fh:
            obj = json.load(fh)
        if obj.get("digest") != self.params_digest():
            return
        for key, val in obj["symbols"].items():
            a, m = key.split("/")
            self.table[(int(a), int(m))] = Fraction(val)

    def save_cache(self):
        if not (self.use_cache and self.cache_dir):
            return
        os.makedirs(self.cache_dir, exist_ok=True)
        obj = {
            "digest": self.params_digest(),
            "label": self.fixture.label,
            "symbols": {f"{a}/{m}": str(v) for (a, m), v in
                        sorted(self.table.items())},
        }
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=0, sort_keys=True)
        os.replace(tmp, self._cache_path())

    # -- numerics --

    def _ctx(self, digits):
        gmpy2.get_context().precision = int(digits * 3.4) + 24

    def _ensure_coeffs(self, M):
        if len(self._coeffs) >= M:
            return
        if not hasattr(self, "_prime_cache"):
            self._prime_cache = {}
        grow = max(M + 2000, (11 * len(self._coeffs)) // 10, 1000)
        self._coeffs = q_expansion(self.curve, grow,
                                   self.fixture.reduction_types,
                                   prime_cache=self._prime_cache)

    def max_terms_for_level(self, n):
        """Upper bound on the q-expansion length level n will request."""
        p = self.fixture.p
        m = p ** n
        c_max = self.N * (m // 2)
        np_terms = _terms_for(1.0 / (1.05 * c_max), 9)
        mp_terms = _terms_for(1.0 / m, self.digits + 12)
        return max(np_terms, mp_terms)

    def lattice(self, digits=None):
        digits = digits or self.digits + 16
        if self._lattice is None or self._lattice[0] < digits:
            w1, w2 = period_lattice(self.curve, digits)
            if self.fixture.periods:
                # ingested periods cross-check the AGM computation
                self._ctx(30)
                ref1 = gmpy2.mpfr(self.fixture.periods[0])
                if abs(ref1 - w1) > abs(w1) * 1e-20:
                    raise SymbolError(
                        f"AGM period disagrees with the fixture value: "
                        f"{w1} vs {ref1}")
            self._lattice = (digits, w1, w2)
        return self._lattice[1], self._lattice[2]

    def _P_mp(self, z, digits):
        """P(z) = sum (a_k/k) q^k at full precision (gmpy2)."""
        self._ctx(digits)
        h = float(z.imag)
        M = _terms_for(h, digits)
        self._ensure_coeffs(M)
        q = gmpy2.exp(2j * gmpy2.const_pi() * z)
        acc = gmpy2.mpc(0)
        powq = gmpy2.mpc(1)
        coeffs = self._coeffs
        for k in range(1, M + 1):
            powq = powq * q
            ak = coeffs[k - 1]
            if ak:
                acc += gmpy2.mpfr(ak) / k * powq
        return acc

    def _P_np(self, z, digits=15):
        """P(z) in double precision with exact-phase chunking (numpy)."""
        h = z.imag
        M = _terms_for(h, digits)
        self._ensure_coeffs(M)
        a = np.asarray(self._coeffs[:M], dtype=np.float64)
        k = np.arange(1, M + 1, dtype=np.float64)
        total = 0.0 + 0.0j
        chunk = 65536
        self._ctx(40)
        zc = gmpy2.mpc(z.real, z.imag)
        for start in range(0, M, chunk):
            stop = min(start + chunk, M)
            base = gmpy2.exp(2j * gmpy2.const_pi() * zc * (start + 1))
            q = complex(gmpy2.exp(2j * gmpy2.const_pi() * zc))
            powers = complex(base) * q ** np.arange(0, stop - start)
            total += np.sum(a[start:stop] / k[start:stop] * powers)
        return total

    def fricke_eigenvalue(self):
        """eps with f|W_N = eps f, computed from f at a non-fixed point."""
        if self._eps is not None:
            return self._eps
        digits = 25
        self._ctx(digits)
        N = self.N
        sqN = gmpy2.sqrt(gmpy2.mpfr(N))
        for t in (1.13, 1.31, 1.57):
            z = gmpy2.mpc(0, t / float(sqN))
            wz = -1 / (N * z)
            fz = self._f_value(z, digits)
            fwz = self._f_value(wz, digits)
            if abs(fz) < 1e-12:
                continue
            eps = fwz / (N * z * z * fz)
            val = float(eps.real)
            if abs(eps.imag) < 1e-10 and abs(abs(val) - 1) < 1e-8:
                self._eps = 1 if val > 0 else -1
                return self._eps
        raise SymbolError("could not determine the Fricke eigenvalue")

    def _f_value(self, z, digits):
        h = float(z.imag)
        M = _terms_for(h, digits)
        self._ensure_coeffs(M)
        q = gmpy2.exp(2j * gmpy2.const_pi() * z)
        acc = gmpy2.mpc(0)
        powq = gmpy2.mpc(1)
        for k in range(1, M + 1):
            powq = powq * q
            ak = self._coeffs[k - 1]
            if ak:
                acc += ak * powq
        return acc

    # -- lattice snapping --

    def _snap_lattice(self, w, digits=None):
        """Exact lattice coordinates (n1, n2) of a period value, den <= 4."""
        w1, w2 = self.lattice(digits)
        det = float(w1) * float(w2.imag)
        n1f = (w.real * float(w2.imag) - w.imag * float(w2.real)) / det
        n2f = (w.imag * float(w1)) / det
        best = None
        for den in (1, 2, 3, 4):
            c1 = round(n1f * den)
            c2 = round(n2f * den)
            err = abs(n1f - c1 / den) + abs(n2f - c2 / den)
            if err < 1e-5 and (best is None or err < best[0]):
                best = (err, Fraction(c1, den), Fraction(c2, den))
        if best is None:
            raise SymbolError(f"period value {w} does not snap to the lattice")
        _, n1, n2 = best
        resid = abs(w - (float(n1) * complex(float(w1), 0)
                         + float(n2) * complex(w2)))
        scale = max(1.0, abs(float(w1)))
        if resid > 1e-6 * scale:
            raise SymbolError(f"lattice snap residual too large: {resid}")
        return n1, n2

    def _gamma_period(self, A, C):
        """lambda(A/C) for N | C as exact lattice coordinates (n1, n2).

        Evaluated in double precision at two independent base points; both
        must snap to the same lattice point.
        """
        D = pow(A, -1, C)
        if D > C // 2:
            D -= C
        B = (A * D - 1) // C
        assert A * D - B * C == 1
        out = None
        for h0 in (1.0, 1.043):
            z0 = complex(-D / C, h0 / C)
            # gamma z0 = (A z0 + B)/(C z0 + D), and C z0 + D = i h0
            gz0 = (A * z0 + B) / (C * z0 + D)
            val = self._P_np(z0) - self._P_np(gz0)
            snap = self._snap_lattice(val)
            if out is None:
                out = snap
            elif out != snap:
                raise SymbolError(
                    f"period snap disagrees between base points: {out} vs {snap}")
        return out

    # -- the symbol --

    def raw_lambda_real(self, a, m, digits):
        """Re(lambda(a/m)) as an mpfr at roughly `digits` working digits.

        lambda is oriented from i oo to the cusp, so lambda(0) = +L(E,1);
        the derivation in the module docstring computes the reverse path,
        whence the overall sign flip at the end.
        """
        self._ctx(digits)
        N = self.N
        eps = self.fricke_eigenvalue()
        if m == 1:
            if eps == 1:
                return gmpy2.mpfr(0)
            sqN = gmpy2.sqrt(gmpy2.mpfr(N))
            val = self._P_mp(gmpy2.mpc(0, 1 / sqN), digits)
            return ((1 - eps) * val).real
        if gcd(m, self.N) != 1:
            raise SymbolError(f"denominator {m} shares a factor with the "
                              f"conductor; outside this engine's range")
        a = a % m
        if gcd(a, m) != 1:
            raise SymbolError(f"{a}/{m} is not in lowest terms")
        if 2 * a > m:
            a -= m
        zstar = gmpy2.mpc(Fraction(a, m), Fraction(abs(a), m))
        t1 = -self._P_mp(zstar, digits)
        wzstar = -1 / (N * zstar)
        t2 = self._P_mp(wzstar, digits)
        # leftover cusp -m/(N a), shifted into [-1/2, 1/2)
        c = Fraction(-m, N * a)
        shift = round(c)
        c -= shift
        A, C = c.numerator, c.denominator
        if C != N * abs(a):
            # gcd(m, N a) = 1 guarantees this; guard anyway
            raise SymbolError("unexpected cusp denominator")
        if A == 0:
            raise SymbolError("cusp reduction degenerated; gcd assumptions violated")
        n1, n2 = self._gamma_period(A, C)
        w1, w2 = self.lattice(digits + 10)
        lam_cusp = (gmpy2.mpfr(n1.numerator) / n1.denominator * w1
                    + gmpy2.mpfr(n2.numerator) / n2.denominator * w2.real)
        return -(eps * (lam_cusp + t2.real) + t1.real)

    def symbol(self, a, m):
        """[a/m]^+ = Re(lambda(a/m)) / Omega+ as an exact, verified rational."""
        if m == 1:
            a = 0
        key = (min(a % m, (-a) % m) if m > 1 else 0, m)
        if key in self.table:
            return self.table[key]
        if not self._loaded:
            self.load_cache()
            if key in self.table:
                return self.table[key]
        a = key[0]
        digits = self.digits
        w1, _ = self.lattice(digits + 16)
        val = self.raw_lambda_real(a, m, digits) / w1
        bound = self.denominator_bound(m)
        frac = Fraction(*val.as_integer_ratio()).limit_denominator(bound)
        err = abs(val - gmpy2.mpfr(frac.numerator) / frac.denominator)
        tol = gmpy2.mpfr(10) ** (-(digits - 8))
        if err > tol * max(1, abs(val)):
            raise RationalRecognitionError(
                f"[{a}/{m}] = {val} does not snap within {tol} "
                f"(denominator bound {bound})")
        # verification pass at higher precision
        digits2 = digits + 12
        val2 = self.raw_lambda_real(a, m, digits2) / self.lattice(digits2 + 16)[0]
        err2 = abs(val2 - gmpy2.mpfr(frac.numerator) / frac.denominator)
        tol2 = gmpy2.mpfr(10) ** (-(digits2 - 8))
        if err2 > tol2 * max(1, abs(val2)):
            raise RationalRecognitionError(
                f"[{a}/{m}] snap failed re-verification at {digits2} digits")
        self.table[key] = frac
        return frac

    def required_keys(self, n):
        """Symbol keys needed for the level-n Riemann sum (reduced, even)."""
        p = self.fixture.p
        keys = {(0, 1)}
        for j in range(1, n + 1):
            m = p ** j
            for a in range(1, m):
                if a % p:
                    keys.add((min(a, m - a), m))
        return sorted(keys)

    def compute_level(self, n, jobs=1):
        """Fill the table for level n; distinct symbols are pure and may be
        evaluated in a parallel map (deterministic merge, atomic cache write)."""
        keys = [k for k in self.required_keys(n) if k not in self.table]
        if not keys:
            return
        if not self._loaded:
            self.load_cache()
            keys = [k for k in keys if k not in self.table]
        self._ensure_coeffs(self.max_terms_for_level(n))
        if jobs <= 1 or len(keys) < 4:
            for a, m in keys:
                self.symbol(a, m)
        else:
            import concurrent.futures as cf
            spec = (self.fixture.to_json(), self.digits)
            chunks = [keys[i::jobs] for i in range(jobs)]
            with cf.ProcessPoolExecutor(max_workers=jobs) as ex:
                for part in ex.map(_symbol_worker, [(spec, c) for c in chunks]):
                    self.table.update(part)
        self.save_cache()

    # -- exact consistency checks on the snapped table --

    def check_evenness(self, a, m):
        return self.symbol(a, m) == self.symbol(-a % m if m > 1 else 0, m)

    def check_hecke(self, ell, a, m):
        """a_ell [a/m] = [ell a / m] + sum_c [(a + c m)/(ell m)] for good ell."""
        if self.N % ell == 0:
            raise SymbolError(f"T_{ell} relation requires a good prime")
        self._ensure_coeffs(ell)
        a_ell = self._coeffs[ell - 1]
        lhs = a_ell * self.symbol(a, m)
        rhs = self.symbol(ell * a, m)
        for c in range(ell):
            num, den = a + c * m, ell * m
            g = gcd(num, den)
            rhs += self.symbol(num // g, den // g)
        return lhs == rhs

    def check_distribution(self, p, n, a):
        """Exact: sum_{b = a mod p^(n-1)} mu(b + p^n) = mu(a + p^(n-1))."""
        from .padics import QuadExt
        mu_n1 = self.mu(p, n - 1, a)
        tot = QuadExt.of(p, 0)
        for c in range(p):
            tot = tot + self.mu(p, n, a + c * p ** (n - 1))
        return (tot - mu_n1).is_zero()

    def mu(self, p, n, a):
        """mu_alpha(a + p^n Z_p) = alpha^-n [a/p^n]^+ - alpha^-(n+1) [a/p^(n-1)]^+,
        exactly in Q(alpha)."""
        from .padics import QuadExt
        al = QuadExt.alpha(p)
        s1 = self.symbol(a % p ** n, p ** n)
        s0 = self.symbol(a % p ** (n - 1) if n >= 2 else 0,
                         p ** (n - 1) if n >= 2 else 1)
        return al ** (-n) * s1 - al ** (-(n + 1)) * s0


def _symbol_worker(payload):
    """Process-pool worker: evaluate a chunk of symbols on a fresh engine."""
    (fixture_json, digits), keys = payload
    from .curves import CurveFixture
    eng = ModularSymbolEngine(CurveFixture(**fixture_json), digits=digits,
                              use_cache=False)
    out = {}
    for a, m in keys:
        out[(a, m)] = eng.symbol(a, m)
    return out
