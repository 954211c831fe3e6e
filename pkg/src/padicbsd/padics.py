"""Finite-precision arithmetic in Q_p and the ramified quadratic extension Q_p(s), s^2 = -p.

Every element carries an explicit absolute precision.  Precisions and
valuations on the extension are half-integers; internally both are stored
doubled (as ints) so that no floating point or Fraction creeps into the
bookkeeping.  Arithmetic never reports more precision than its inputs
justify:

    N(x + y)  = min(N(x), N(y))
    N(x * y)  = min(N(x) + v(y), N(y) + v(x))
    N(1 / x)  = N(x) - 2 v(x)

Zero at precision N is reported as the valuation lower bound "v >= N",
never as exact infinity, so downstream comparisons degrade honestly to
"undecidable".
"""

from dataclasses import dataclass
from fractions import Fraction


class PrecisionError(ArithmeticError):
    """Raised when an operation cannot be certified at the available precision."""


def vp(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of integer 0 is undefined; handle zero separately")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(q, p):
    """p-adic valuation of a nonzero Fraction."""
    q = Fraction(q)
    return vp(q.numerator, p) - vp(q.denominator, p)


def inv_mod(a, m):
    return pow(a, -1, m)


@dataclass(frozen=True)
class Valuation:
    """A (half-integral) valuation, possibly only known as a lower bound.

    ``v2`` is twice the valuation.  ``decided`` is False when the element is
    indistinguishable from zero at its precision, in which case ``v2`` is a
    lower bound (twice the absolute precision).
    """

    v2: int
    decided: bool = True

    @property
    def half(self):
        return Fraction(self.v2, 2)

    def __str__(self):
        s = str(Fraction(self.v2, 2))
        return s if self.decided else f">={s}"


# --- the main class ---------------------------------------------------------

def _reduce(p, a, b, shift, prec2):
    """Canonical representative: coordinates reduced mod their moduli, shift minimal."""
    na = shift + (prec2 + 1) // 2
    nb = shift + prec2 // 2
    a = a % p ** na if na > 0 else 0
    b = b % p ** nb if nb > 0 else 0
    # symmetric lift keeps representatives small and canonical
    while shift > 0 and a % p == 0 and b % p == 0:
        a //= p
        b //= p
        shift -= 1
        na -= 1
        nb -= 1
        a = a % p ** na if na > 0 else 0
        b = b % p ** nb if nb > 0 else 0
    return a, b, shift


@dataclass(frozen=True)
class PadicElement:
    """An element (a + b*s)/p^shift of Q_p(s), s = sqrt(-p), at absolute precision prec2/2.

    For elements of Q_p (``ext`` False) the b-coordinate is identically zero.
    Instances are immutable; all operations are pure.
    """

    p: int
    a: int
    b: int
    shift: int
    prec2: int
    ext: bool = False

    # -- constructors --

    @staticmethod
    def make(p, a, b, shift, prec2, ext):
        if b != 0:
            ext = True
        a, b, shift = _reduce(p, a, b, shift, prec2)
        return PadicElement(p, a, b, shift, prec2, ext)

    @staticmethod
    def from_rational(p, q, prec2, ext=False):
        """Exact embedding of a rational at absolute precision prec2/2."""
        q = Fraction(q)
        den = q.denominator
        k = vp(den, p) if den != 0 else 0
        den_unit = den // p ** k
        na = k + (prec2 + 1) // 2
        if na <= 0:
            return PadicElement.make(p, 0, 0, 0, prec2, ext)
        a = q.numerator * inv_mod(den_unit, p ** na) % p ** na
        return PadicElement.make(p, a, 0, k, prec2, ext)

    @staticmethod
    def from_pair(p, qa, qb, prec2):
        """Exact embedding of qa + qb*s with rational coordinates."""
        x = PadicElement.from_rational(p, qa, prec2, ext=True)
        y = PadicElement.from_rational(p, qb, prec2, ext=True)
        return x + y * PadicElement.sqrt_minus_p(p, prec2)

    @staticmethod
    def zero(p, prec2, ext=False):
        return PadicElement(p, 0, 0, 0, prec2, ext)

    @staticmethod
    def one(p, prec2, ext=False):
        return PadicElement.from_rational(p, 1, prec2, ext)

    @staticmethod
    def sqrt_minus_p(p, prec2):
        """The chosen root alpha = s of x^2 + p."""
        return PadicElement.make(p, 0, 1, 0, prec2, True)

    # -- basic queries --

    def is_zero_at_precision(self):
        return self.a == 0 and self.b == 0

    def valuation(self):
        """Normalized valuation with v(p) = 1, v(s) = 1/2; lower bound if zero at precision."""
        cands = []
        if self.a != 0:
            cands.append(2 * (vp(self.a, self.p) - self.shift))
        if self.b != 0:
            cands.append(2 * (vp(self.b, self.p) - self.shift) + 1)
        if not cands:
            return Valuation(self.prec2, decided=False)
        v2 = min(cands)
        if v2 >= self.prec2:
            return Valuation(self.prec2, decided=False)
        return Valuation(v2, decided=True)

    def _v2_lower(self):
        v = self.valuation()
        return v.v2

    # -- arithmetic --

    def _check_compat(self, other):
        if self.p != other.p:
            raise ValueError("mixed primes")

    def _lift(self, other):
        """Coerce an exact scalar at enough precision not to limit the result."""
        buf = self.prec2 + 2 * abs(self._v2_lower()) + 8
        return PadicElement.from_rational(self.p, other, buf, self.ext)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        self._check_compat(other)
        sh = max(self.shift, other.shift)
        a = self.a * self.p ** (sh - self.shift) + other.a * self.p ** (sh - other.shift)
        b = self.b * self.p ** (sh - self.shift) + other.b * self.p ** (sh - other.shift)
        return PadicElement.make(self.p, a, b, sh, min(self.prec2, other.prec2),
                                 self.ext or other.ext)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return PadicElement(self.p, (-self.a) % self._mod_a() if self.a else 0,
                            (-self.b) % self._mod_b() if self.b else 0,
                            self.shift, self.prec2, self.ext)

    def _mod_a(self):
        return self.p ** (self.shift + (self.prec2 + 1) // 2)

    def _mod_b(self):
        return self.p ** (self.shift + self.prec2 // 2)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        self._check_compat(other)
        p = self.p
        # (a1 + b1 s)(a2 + b2 s) = (a1 a2 - p b1 b2) + (a1 b2 + a2 b1) s
        a = self.a * other.a - p * self.b * other.b
        b = self.a * other.b + self.b * other.a
        prec2 = min(self.prec2 + other._v2_lower(), other.prec2 + self._v2_lower())
        return PadicElement.make(p, a, b, self.shift + other.shift, prec2,
                                 self.ext or other.ext)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self):
        v = self.valuation()
        if not v.decided:
            raise PrecisionError(
                f"cannot invert an element indistinguishable from 0 at precision {v.half}")
        p = self.p
        # 1/x = conj(x) / Norm(x), Norm = a^2 + p b^2 (up to the p^shift scaling)
        norm = self.a * self.a + p * self.b * self.b  # integer, Norm(x)*p^(2 shift)
        prec2 = self.prec2 - 2 * v.v2
        vn = vp(norm, p)
        # want (a - b s) * p^(2 shift) / norm at the right precision
        k = vn + max(1, (prec2 + 1) // 2 + abs(v.v2) + 2)
        u = norm // p ** vn
        uinv = inv_mod(u, p ** k)
        a = self.a * uinv
        b = -self.b * uinv
        # x^{-1} = (a - b s) p^{2 shift} / (p^{vn} u) / p^{2 shift} ... combined shift:
        # x = (a+bs)/p^shift, norm_int = a^2+p b^2 means Norm(x) = norm_int / p^{2 shift}
        # 1/x = conj(x)/Norm(x) = (a-bs) p^{shift} / norm_int
        sh = vn - self.shift
        if sh < 0:
            a *= p ** (-sh)
            b *= p ** (-sh)
            sh = 0
        return PadicElement.make(p, a, b, sh, prec2, self.ext)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._lift(other)
        return self.__mul__(other.inverse())

    def __rtruediv__(self, other):
        return self.inverse().__mul__(other)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = PadicElement.one(self.p, self.prec2 + 2 * abs(n) * max(0, -self._v2_lower()) + 4,
                               self.ext)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def conjugate(self):
        """Galois conjugation of Q_p(s)/Q_p: s -> -s.  Fixes Q_p."""
        return PadicElement(self.p, self.a,
                            (-self.b) % self._mod_b() if self.b else 0,
                            self.shift, self.prec2, self.ext)

    # -- comparisons --

    def agrees_with(self, other):
        """True when self - other is indistinguishable from 0 at the joint precision."""
        if isinstance(other, (int, Fraction)):
            other = PadicElement.from_rational(self.p, other, self.prec2, self.ext)
        return not (self - other).valuation().decided

    def cap_precision(self, prec2):
        if prec2 >= self.prec2:
            return self
        return PadicElement.make(self.p, self.a, self.b, self.shift, prec2, self.ext)

    # -- serialization: "a + b*s mod p^N" --

    def to_str(self):
        ra = Fraction(self.a, self.p ** self.shift)
        n = Fraction(self.prec2, 2)
        if self.ext:
            rb = Fraction(self.b, self.p ** self.shift)
            return f"{ra} + {rb}*s mod {self.p}^{n}"
        return f"{ra} mod {self.p}^{n}"

    @staticmethod
    def from_str(text):
        body, mod = text.split(" mod ")
        pstr, nstr = mod.split("^")
        p = int(pstr)
        prec2 = int(2 * Fraction(nstr))
        if "*s" in body:
            apart, bpart = body.split(" + ")
            qa = Fraction(apart)
            qb = Fraction(bpart.replace("*s", ""))
            ext = True
        else:
            qa = Fraction(body)
            qb = Fraction(0)
            ext = False
        ka = vp(qa.denominator, p) if qa != 0 else 0
        kb = vp(qb.denominator, p) if qb != 0 else 0
        sh = max(ka, kb)
        if (qa.denominator != p ** ka) or (qb.denominator != p ** kb):
            raise ValueError(f"non p-power denominator in {text!r}")
        a = int(qa * p ** sh)
        b = int(qb * p ** sh)
        el = PadicElement(p, a, b, sh, prec2, ext or b != 0)
        if (el.a, el.b, el.shift) != _reduce(p, a, b, sh, prec2):
            raise ValueError(f"non-canonical representative in {text!r}")
        return el

    def __str__(self):
        return self.to_str()


# --- verdicts ----------------------------------------------------------------

EQUAL_UP_TO_UNIT = "equal-up-to-unit"
UNEQUAL = "unequal"
UNDECIDABLE = "undecidable"


def unit_equal(x, y):
    """Decide whether x and y agree up to a p-adic unit (i.e. have equal valuation)."""
    vx, vy = x.valuation(), y.valuation()
    if vx.decided and vy.decided:
        return EQUAL_UP_TO_UNIT if vx.v2 == vy.v2 else UNEQUAL
    if vx.decided and not vy.decided:
        return UNEQUAL if vx.v2 < vy.v2 else UNDECIDABLE
    if vy.decided and not vx.decided:
        return UNEQUAL if vy.v2 < vx.v2 else UNDECIDABLE
    return UNDECIDABLE


# --- the Iwasawa logarithm ----------------------------------------------------

def iwasawa_log(u):
    """log_p on 1 + pZ_p by the defining series, with a certified tail bound.

    The output precision accounts both for the propagated precision of the
    partial sums and for the omitted tail: term k has valuation at least
    k*v(u-1) - v_p(k).
    """
    if u.ext:
        raise ValueError("iwasawa_log is defined on 1 + pZ_p inside Q_p")
    t = u - 1
    vt = t.valuation()
    if not vt.decided:
        # u = 1 at precision: log is 0 to essentially the same precision
        return PadicElement.zero(u.p, vt.v2, ext=False)
    if vt.v2 < 2:
        raise ValueError(f"iwasawa_log requires v(u-1) >= 1, got v = {vt.half}")
    p = u.p

    def ilog(k):
        j = 0
        while p ** (j + 1) <= k:
            j += 1
        return j

    def tail_floor(K):
        # term k has v2 >= k*vt2 - 2*v_p(k) >= k*vt2 - 2*(ilog(k)+1); the
        # envelope k*vt2 - 2*log_p(k) is increasing for vt2 >= 2, so the
        # minimum over k > K sits at k = K+1
        return (K + 1) * vt.v2 - 2 * (ilog(K + 1) + 1)

    target2 = u.prec2
    K = 2
    while tail_floor(K) <= target2:
        K += 1
    acc = PadicElement.zero(p, target2)
    power = PadicElement.one(p, target2 + 2 * K)
    sign = 1
    for k in range(1, K + 1):
        power = power * t
        acc = acc + power / (sign * k)
        sign = -sign
    return acc.cap_precision(min(acc.prec2, tail_floor(K)))


def unit_log(x):
    """Iwasawa-branch logarithm of any x in Q_p^* with decided valuation.

    log_p(p) = 0 defines the branch; for a unit u the series is applied to
    u^(p-1) and the result divided by p-1.
    """
    v = x.valuation()
    if not v.decided:
        raise PrecisionError("unit_log of an element indistinguishable from 0")
    if v.v2 % 2 != 0:
        raise ValueError("unit_log needs an element of Q_p (integral valuation)")
    p = x.p
    u = x / Fraction(p) ** (v.v2 // 2)
    w = u ** (p - 1)
    return iwasawa_log(w) / (p - 1)


# --- exact quadratic algebra Q[alpha]/(alpha^2 + p) ----------------------------

@dataclass(frozen=True)
class QuadExt:
    """Exact element x + y*alpha of Q(alpha), alpha^2 = -p, with Fraction coordinates.

    Used for the symbolic identity checks (no rounding at all) and for exact
    Riemann-sum bookkeeping before any p-adic embedding.
    """

    p: int
    x: Fraction
    y: Fraction

    @staticmethod
    def of(p, x, y=0):
        return QuadExt(p, Fraction(x), Fraction(y))

    @staticmethod
    def alpha(p):
        return QuadExt(p, Fraction(0), Fraction(1))

    def __add__(self, other):
        other = self._coerce(other)
        return QuadExt(self.p, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(self.p, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadExt(self.p,
                       self.x * other.x - self.p * self.y * other.y,
                       self.x * other.y + self.y * other.x)

    __rmul__ = __mul__

    def inverse(self):
        n = self.x * self.x + self.p * self.y * self.y
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in Q(alpha)")
        return QuadExt(self.p, self.x / n, -self.y / n)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt.of(self.p, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            base = base * base
        return out

    def conjugate(self):
        return QuadExt(self.p, self.x, -self.y)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        return QuadExt(self.p, Fraction(other), Fraction(0))

    def is_zero(self):
        return self.x == 0 and self.y == 0

    def valuation2(self):
        """Twice the valuation (v(alpha) = 1/2), or None for 0."""
        if self.is_zero():
            return None
        cands = []
        if self.x != 0:
            cands.append(2 * vp_fraction(self.x, self.p))
        if self.y != 0:
            cands.append(2 * vp_fraction(self.y, self.p) + 1)
        return min(cands)

    def embed(self, prec2):
        """Embedding into PadicElement sending alpha to the chosen root s."""
        return PadicElement.from_pair(self.p, self.x, self.y, prec2)

    def __str__(self):
        return f"{self.x} + {self.y}*a"
