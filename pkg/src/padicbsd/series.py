"""Truncated power series over exact rationals, Q(alpha), or p-adic elements.

One class covers the three coefficient domains (duck-typed coefficients):
exact bases ("Q", "Q(a)") carry no precision loss, the p-adic bases ("Qp",
"Qp(s)") carry per-coefficient precision through the PadicElements
themselves.  The X-adic truncation order of every arithmetic result is the
minimum of the inputs'.

Also houses the cyclotomic polynomials Phi_n(1+X), the half-logarithms
log_p^+/log_p^- (products of even/odd-indexed Phi/p, scaled by 1/p), and the
2x2 logarithm matrix built from them.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .padics import PadicElement, QuadExt, PrecisionError, vp


class OrderUndecidableError(PrecisionError):
    """Order of vanishing cannot be certified at the available precision."""


def _is_exact(c):
    return isinstance(c, (int, Fraction, QuadExt))


def _certified_nonzero(c):
    if isinstance(c, (int, Fraction)):
        return c != 0
    if isinstance(c, QuadExt):
        return not c.is_zero()
    return c.valuation().decided


def _zero_like(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(0)
    if isinstance(c, QuadExt):
        return QuadExt.of(c.p, 0)
    return PadicElement.zero(c.p, c.prec2, c.ext)


@dataclass(frozen=True)
class TruncatedSeries:
    """A power series known modulo X^trunc, coefficients indexed 0..trunc-1."""

    coeffs: tuple
    trunc: int
    base: str = "Q"

    @staticmethod
    def make(coeffs, trunc, base="Q"):
        coeffs = list(coeffs)
        if len(coeffs) < trunc:
            raise ValueError("not enough coefficients for the stated truncation")
        return TruncatedSeries(tuple(coeffs[:trunc]), trunc, base)

    @staticmethod
    def from_rationals(vals, trunc):
        return TruncatedSeries.make([Fraction(v) for v in vals], trunc, "Q")

    def __getitem__(self, j):
        return self.coeffs[j]

    def __len__(self):
        return self.trunc

    # -- arithmetic --

    def _align(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        # scalar: build the constant series with a matching coefficient type
        lead = self.coeffs[0]
        coeffs = []
        for j in range(self.trunc):
            if j == 0:
                if isinstance(lead, PadicElement) and not isinstance(other, PadicElement):
                    coeffs.append(lead._lift(other))
                else:
                    coeffs.append(other)
            else:
                coeffs.append(_zero_like(lead))
        return TruncatedSeries.make(coeffs, self.trunc, self.base)

    def __add__(self, other):
        other = self._align(other)
        m = min(self.trunc, other.trunc)
        return TruncatedSeries.make(
            [self.coeffs[j] + other.coeffs[j] for j in range(m)], m, self.base)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries.make([-c for c in self.coeffs], self.trunc, self.base)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scalar_mul(other)
        m = min(self.trunc, other.trunc)
        out = []
        for j in range(m):
            acc = None
            for i in range(j + 1):
                term = self.coeffs[i] * other.coeffs[j - i]
                acc = term if acc is None else acc + term
            out.append(acc)
        return TruncatedSeries.make(out, m, self.base)

    def scalar_mul(self, c):
        return TruncatedSeries.make([x * c for x in self.coeffs], self.trunc, self.base)

    __rmul__ = __mul__

    def shift_x(self, k):
        """Multiply by X^k; the truncation window moves with it."""
        zeros = [_zero_like(self.coeffs[0])] * k
        return TruncatedSeries.make(zeros + list(self.coeffs), self.trunc + k, self.base)

    def at_zero(self):
        return self.coeffs[0]

    def truncate(self, m):
        if m > self.trunc:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries.make(self.coeffs[:m], m, self.base)

    # -- division --

    def divide(self, g):
        """Series h with h*g = f, by exact recursive back-substitution.

        Requires the constant term of g to have decided valuation (exact
        nonzero for exact bases).  Per-coefficient p-adic precision is
        inherited from the coefficient arithmetic, so dividing by a series
        with constant term of valuation w costs w per coefficient.
        """
        f = self
        if not _certified_nonzero(g.coeffs[0]):
            raise PrecisionError("division by a series whose constant term is "
                                 "indistinguishable from 0")
        m = min(f.trunc, g.trunc)
        g0inv = (Fraction(1) / Fraction(g.coeffs[0])
                 if isinstance(g.coeffs[0], (int, Fraction))
                 else 1 / g.coeffs[0])
        out = []
        for j in range(m):
            acc = f.coeffs[j]
            for i in range(j):
                acc = acc - out[i] * g.coeffs[j - i]
            out.append(acc * g0inv)
        return TruncatedSeries.make(out, m, f.base)

    def __truediv__(self, g):
        if isinstance(g, TruncatedSeries):
            return self.divide(g)
        if isinstance(g, (int, Fraction)) and self.base in ("Q",):
            return self.scalar_mul(Fraction(1, 1) / Fraction(g))
        if isinstance(g, QuadExt):
            return self.scalar_mul(g.inverse())
        if isinstance(g, PadicElement):
            return self.scalar_mul(g.inverse())
        return self.scalar_mul(Fraction(1) / Fraction(g))

    # -- order of vanishing --

    def ord_and_leading(self, min_zero_prec2=1):
        """(rho, leading coefficient): rho the least index certified nonzero.

        All lower coefficients must be (certified) zero at their precision,
        with precision at least min_zero_prec2/2 for p-adic coefficients.
        Raises OrderUndecidableError when no coefficient can be certified
        nonzero before the truncation runs out, or when a skipped coefficient
        carries no usable precision.
        """
        for j, c in enumerate(self.coeffs):
            if _certified_nonzero(c):
                return j, c
            if isinstance(c, PadicElement) and c.prec2 < min_zero_prec2:
                raise OrderUndecidableError(
                    f"coefficient {j} carries precision {Fraction(c.prec2, 2)} "
                    f"< {Fraction(min_zero_prec2, 2)}; order undecidable")
        raise OrderUndecidableError(
            f"all {self.trunc} known coefficients are zero at their precision")

    # -- conversions and serialization --

    def embed(self, prec2):
        """Exact-base series embedded p-adically (Q -> Qp, Q(a) -> Qp(s))."""
        if self.base == "Q":
            p = None
            raise ValueError("embedding a plain rational series needs a prime; "
                             "use embed_at(p, prec2)")
        if self.base == "Q(a)":
            return TruncatedSeries.make([c.embed(prec2) for c in self.coeffs],
                                        self.trunc, "Qp(s)")
        return self

    def embed_at(self, p, prec2, ext=False):
        if self.base != "Q":
            raise ValueError("embed_at applies to rational series")
        return TruncatedSeries.make(
            [PadicElement.from_rational(p, c, prec2, ext) for c in self.coeffs],
            self.trunc, "Qp(s)" if ext else "Qp")

    def map_coeffs(self, f, base=None):
        return TruncatedSeries.make([f(c) for c in self.coeffs], self.trunc,
                                    base or self.base)

    def to_json(self):
        if self.base in ("Qp", "Qp(s)"):
            cs = [c.to_str() for c in self.coeffs]
        else:
            cs = [str(c) for c in self.coeffs]
        return {"trunc_order": self.trunc, "base": self.base, "coeffs": cs}

    @staticmethod
    def from_json(obj):
        base = obj.get("base", "Qp")
        if base in ("Qp", "Qp(s)"):
            cs = [PadicElement.from_str(s) for s in obj["coeffs"]]
        elif base == "Q":
            cs = [Fraction(s) for s in obj["coeffs"]]
        else:
            raise ValueError(f"cannot deserialize base {base!r}")
        return TruncatedSeries.make(cs, obj["trunc_order"], base)


# --- cyclotomic polynomials and half-logarithms --------------------------------

def cyclotomic(p, n, M):
    """Phi_n(1+X) = sum_{i=0}^{p-1} (1+X)^(p^(n-1) i), truncated to X^M, over Q.

    The summation index starts at 0, which is what makes Phi_n(1) = p; see
    the README notes on conventions.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    e = p ** (n - 1)
    coeffs = []
    for j in range(M):
        coeffs.append(Fraction(sum(comb(e * i, j) for i in range(p))))
    return TruncatedSeries.make(coeffs, M, "Q")


def half_log_exact(p, sign, M, K):
    """Exact-rational truncation of log_p^(sign) using factors m = 1..K.

    sign '+' takes the even-indexed factors Phi_{2m}(1+X)/p, '-' the odd ones,
    and the whole product is scaled by 1/p.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    acc = TruncatedSeries.from_rationals([1] + [0] * (M - 1), M)
    for m in range(1, K + 1):
        k = 2 * m if sign == "+" else 2 * m - 1
        factor = cyclotomic(p, k, M).scalar_mul(Fraction(1, p))
        acc = acc * factor
    return acc.scalar_mul(Fraction(1, p))


def _half_log_tail_bound2(p, sign, coeffs, K, j, M):
    """Twice the certified valuation of the coefficient-j error from factors beyond K.

    An omitted factor with index k >= k0 differs from 1 by eps with
    v(eps_i) >= k - 2 - v_p(i) for i >= 1; provided k0 - 2 >= max v_p(i)
    (so products of several eps are no larger than single ones) the relative
    error R satisfies v(R_i) >= k0 - 2 - v_p(i), and the absolute error on
    coefficient j is bounded through the actual valuations of the computed
    coefficients.
    """
    if j == 0:
        return None  # constant coefficient is exact (every omitted factor has constant 1)
    k0 = 2 * K + 2 if sign == "+" else 2 * K + 1
    vmax = 0
    while p ** (vmax + 1) < M:
        vmax += 1
    if k0 - 2 < vmax:
        return -10 ** 9  # cutoff too small for the multi-factor bound to apply
    best = None
    for i in range(1, j + 1):
        c = coeffs[j - i]
        vc = 0 if c == 0 else vp_fraction2(c, p)
        b = 2 * (k0 - 2 - vp(i, p)) + vc
        best = b if best is None else min(best, b)
    return best


def vp_fraction2(q, p):
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of 0")
    return 2 * (vp(q.numerator, p) - vp(q.denominator, p))


def half_log(p, sign, M, prec2, K=None):
    """Truncated log_p^(sign) over Qp with certified per-coefficient precision.

    The factor cutoff is grown until every coefficient's omitted-tail error
    is beyond the requested precision; a user-pinned K that cannot certify
    prec2 is an error.
    """
    auto = K is None
    K = K if K is not None else 2
    while True:
        exact = half_log_exact(p, sign, M, K)
        bounds = [_half_log_tail_bound2(p, sign, exact.coeffs, K, j, M) for j in range(M)]
        ok = all(b is None or b >= prec2 for b in bounds)
        if ok:
            break
        if not auto:
            bad = min(b for b in bounds if b is not None)
            raise PrecisionError(
                f"cutoff K={K} certifies only {Fraction(bad, 2)} digits < "
                f"requested {Fraction(prec2, 2)}")
        K += 1
    out = []
    for j in range(M):
        cap = prec2 if bounds[j] is None else min(prec2, bounds[j])
        out.append(PadicElement.from_rational(p, exact.coeffs[j], cap, ext=False))
    return TruncatedSeries.make(out, M, "Qp")


# --- the logarithm matrix -------------------------------------------------------

@dataclass(frozen=True)
class LogMatrix:
    """M_log = [[log+, log+], [alpha log-, beta log-]] over Qp(s) series."""

    p: int
    plus: TruncatedSeries
    minus: TruncatedSeries
    alpha: PadicElement

    @staticmethod
    def build(p, M, prec2):
        lp = half_log(p, "+", M, prec2)
        lm = half_log(p, "-", M, prec2)
        alpha = PadicElement.sqrt_minus_p(p, prec2 + 8)

        def into_ext(s):
            return s.map_coeffs(
                lambda c: PadicElement.make(c.p, c.a, c.b, c.shift, c.prec2, True),
                "Qp(s)")

        return LogMatrix(p, into_ext(lp), into_ext(lm), alpha)

    @property
    def beta(self):
        return -self.alpha

    def row_times(self, f_minus, f_plus):
        """(f_-, f_+) * M_log = (f_- log+ + f_+ alpha log-, f_- log+ + f_+ beta log-)."""
        first = f_minus * self.plus + f_plus.scalar_mul(self.alpha) * self.minus
        second = f_minus * self.plus + f_plus.scalar_mul(self.beta) * self.minus
        return first, second

    def at_zero(self):
        """Z_log = M_log|_{X=0} as four PadicElements ((1/p, 1/p), (alpha/p, beta/p))."""
        a, b = self.plus.at_zero(), self.plus.at_zero()
        c = self.alpha * self.minus.at_zero()
        d = self.beta * self.minus.at_zero()
        return ((a, b), (c, d))
