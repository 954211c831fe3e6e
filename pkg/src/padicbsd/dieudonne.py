"""Linear algebra in the 2-dimensional Dieudonne module with basis (omega, eta).

Everything here is rational in (alpha, u, v, 1/p), so the same code runs in
two modes: exact symbolic scalars in Q[alpha]/(alpha^2 + p) (QuadExt) and
finite-precision PadicElements.  The test suite exercises both and checks
they agree; this separates algebra bugs from precision bugs.

Vectors are coordinate pairs (c_omega, c_eta).  The pairing is alternating
with [omega, eta] = gram (normalized to 1), Frobenius phi has phi(omega) =
u*omega + v*eta with phi(eta) derived from phi^2 = -1/p, and weak
admissibility is the requirement that v be invertible (phi(omega) not in
Fil^0).
"""

from dataclasses import dataclass
from fractions import Fraction

from .padics import PadicElement, QuadExt


class AdmissibilityError(ValueError):
    """The Frobenius datum violates weak admissibility ([omega, phi omega] = 0)."""


def _is_zeroish(x):
    if isinstance(x, QuadExt):
        return x.is_zero()
    return not x.valuation().decided


@dataclass(frozen=True)
class DieudonneData:
    """Frobenius datum: phi(omega) = u*omega + v*eta, pairing [omega, eta] = gram."""

    p: int
    alpha: object        # chosen root of x^2 + p, QuadExt or PadicElement
    u: object
    v: object
    gram: object

    @staticmethod
    def symbolic(p, u, v, gram=1):
        """Exact mode over Q[alpha]/(alpha^2 + p) with rational u, v."""
        mk = lambda q: QuadExt.of(p, Fraction(q))
        return DieudonneData(p, QuadExt.alpha(p), mk(u), mk(v), mk(gram))

    @staticmethod
    def padic(p, u, v, prec2, gram=1):
        """Finite-precision mode; u, v rationals or PadicElements."""
        def mk(q):
            if isinstance(q, PadicElement):
                return q
            return PadicElement.from_rational(p, Fraction(q), prec2, ext=True)
        return DieudonneData(p, PadicElement.sqrt_minus_p(p, prec2), mk(u), mk(v),
                             mk(gram))

    def __post_init__(self):
        if _is_zeroish(self.v):
            raise AdmissibilityError(
                "[omega, phi(omega)] = 0: datum is not weakly admissible")

    # -- scalars and vectors --

    def scalar(self, q):
        if isinstance(self.alpha, QuadExt):
            return QuadExt.of(self.p, Fraction(q))
        return PadicElement.from_rational(self.p, Fraction(q), self.alpha.prec2,
                                          ext=True)

    @property
    def beta(self):
        return -self.alpha

    @property
    def omega(self):
        return (self.scalar(1), self.scalar(0))

    @property
    def eta(self):
        return (self.scalar(0), self.scalar(1))

    def vec(self, c0, c1):
        return (c0, c1)

    def add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def smul(self, c, x):
        return (c * x[0], c * x[1])

    def pairing(self, x, y):
        """[x, y]_dR: alternating, [omega, eta] = gram."""
        return (x[0] * y[1] - x[1] * y[0]) * self.gram

    def phi(self, x):
        """Frobenius; phi(eta) = ((-1/p - u^2)/v) omega - u eta from phi^2 = -1/p."""
        u, v = self.u, self.v
        w0 = (self.scalar(Fraction(-1, self.p)) - u * u) / v
        return (u * x[0] + w0 * x[1], v * x[0] - u * x[1])

    def one_minus_phi(self, x):
        px = self.phi(x)
        return (x[0] - px[0], x[1] - px[1])

    def one_minus_phi_squared(self, x):
        return self.one_minus_phi(self.one_minus_phi(x))

    # -- derived vectors --

    def eigenvectors(self):
        """(nu_alpha, nu_beta) with phi nu_alpha = alpha^{-1} nu_alpha, nu_alpha + nu_beta = omega."""
        half = self.scalar(Fraction(1, 2))
        phiw = (self.u, self.v)
        nu_a = self.sub(self.omega, self.smul(self.beta, phiw))
        nu_b = self.sub(self.omega, self.smul(self.alpha, phiw))
        return self.smul(half, nu_a), self.smul(half, nu_b)

    def eta_basis(self):
        """(eta_alpha, eta_beta): phi-eigenvectors with [eta_*, omega] = 1."""
        nu_a, nu_b = self.eigenvectors()
        # [beta phi(omega), omega] = -beta v gram; eta_alpha = -(omega - beta phi omega)/that
        denom_a = self.beta * self.v * self.gram
        denom_b = self.alpha * self.v * self.gram
        if _is_zeroish(denom_a) or _is_zeroish(denom_b):
            raise AdmissibilityError("degenerate datum in eta_basis")
        two = self.scalar(2)
        eta_a = self.smul(two / denom_a, nu_a)
        eta_b = self.smul(two / denom_b, nu_b)
        return eta_a, eta_b

    def z_log(self):
        """Z_log = M_log|_{X=0} = (1/p) [[1, 1], [alpha, beta]]."""
        inv_p = self.scalar(Fraction(1, self.p))
        return ((inv_p, inv_p), (self.alpha * inv_p, self.beta * inv_p))

    def z_log_det(self):
        ((a, b), (c, d)) = self.z_log()
        return a * d - b * c

    def n_vectors(self):
        """(N_minus, N_plus) = (nu_beta, -nu_alpha) diag((1-1/alpha)^2, (1-1/beta)^2) adj(p Z_log).

        adj(p Z_log) = [[beta, -1], [-alpha, 1]]; this is the convention that
        reproduces the closed forms N_+ = (1/p - 1) omega - 2 phi(omega) and
        N_- = 2 omega + (1 - p) phi(omega).
        """
        nu_a, nu_b = self.eigenvectors()
        one = self.scalar(1)
        A2 = (one - 1 / self.alpha) ** 2
        B2 = (one - 1 / self.beta) ** 2
        row = (self.smul(A2, nu_b), self.smul(B2, self.smul(self.scalar(-1), nu_a)))
        adj = ((self.beta, self.scalar(-1)), (-self.alpha, one))
        n_minus = self.add(self.smul(adj[0][0], row[0]), self.smul(adj[1][0], row[1]))
        n_plus = self.add(self.smul(adj[0][1], row[0]), self.smul(adj[1][1], row[1]))
        return n_minus, n_plus

    def n_vectors_closed_form(self):
        phiw = (self.u, self.v)
        n_plus = self.sub(self.smul(self.scalar(Fraction(1, self.p) - 1), self.omega),
                          self.smul(self.scalar(2), phiw))
        n_minus = self.add(self.smul(self.scalar(2), self.omega),
                           self.smul(self.scalar(1 - self.p), phiw))
        return n_minus, n_plus

    def nu_pm(self):
        """(nu_minus, nu_plus) = Z_log (nu_alpha; nu_beta); nu_minus = omega/p."""
        nu_a, nu_b = self.eigenvectors()
        inv_p = self.scalar(Fraction(1, self.p))
        nu_minus = self.smul(inv_p, self.add(nu_a, nu_b))
        nu_plus = self.smul(inv_p, self.add(self.smul(self.alpha, nu_a),
                                            self.smul(self.beta, nu_b)))
        return nu_minus, nu_plus

    # -- regulator packaging --

    def reg_pr(self, regulator_values, r):
        """The unique vector R with [R, nu] = Reg_nu / [omega, nu]^(r-1) for the
        supplied nus (at least two, spanning); extra nus are consistency checks.

        regulator_values: list of (nu, Reg_nu) pairs.  Returns (R, residuals).
        """
        if r < 1:
            raise ValueError("r >= 1 required")
        if len(regulator_values) < 2:
            raise ValueError("need at least two nu's")
        eqs = []
        for nu, reg in regulator_values:
            pw = self.pairing(self.omega, nu)
            if _is_zeroish(pw):
                raise ValueError("nu in Fil^0: [omega, nu] = 0")
            rhs = reg / pw ** (r - 1) if r > 1 else reg
            # [R, nu] = (x nu1 - y nu0) gram for R = (x, y)
            eqs.append((nu[1] * self.gram, -nu[0] * self.gram, rhs))
        a1, b1, c1 = eqs[0]
        a2, b2, c2 = eqs[1]
        det = a1 * b2 - a2 * b1
        if _is_zeroish(det):
            raise ValueError("the two nu's are proportional; system is singular")
        x = (c1 * b2 - c2 * b1) / det
        y = (a1 * c2 - a2 * c1) / det
        R = (x, y)
        residuals = [x * a + y * b - c for a, b, c in eqs[2:]]
        return R, residuals

    def coords_in_nu_pm(self, x):
        """Coordinates (c_plus, c_minus) of x in the ordered basis (nu_plus, nu_minus)."""
        nu_minus, nu_plus = self.nu_pm()
        det = nu_plus[0] * nu_minus[1] - nu_plus[1] * nu_minus[0]
        if _is_zeroish(det):
            raise AdmissibilityError("(nu_-, nu_+) do not form a basis at this precision")
        c_plus = (x[0] * nu_minus[1] - x[1] * nu_minus[0]) / det
        c_minus = (nu_plus[0] * x[1] - nu_plus[1] * x[0]) / det
        return c_plus, c_minus

    def modified_reg_coords(self, reg_fn, r):
        """Coordinates of (1 - phi)^2 Reg_PR on (nu_plus, nu_minus), both ways.

        reg_fn maps a vector nu to Reg_nu (degree-r homogeneous discriminant).
        Returns ((c_plus, c_minus), (bf_plus, bf_minus)): the closed-form pair
        (2 Reg_{N+}/[omega,N+]^r, (p-1) Reg_{N-}/[omega,N-]^r) and the
        brute-force matrix path through reg_pr.
        """
        n_minus, n_plus = self.n_vectors()
        pair_p = self.pairing(self.omega, n_plus)
        pair_m = self.pairing(self.omega, n_minus)
        c_plus = self.scalar(2) * reg_fn(n_plus) / pair_p ** r
        c_minus = self.scalar(self.p - 1) * reg_fn(n_minus) / pair_m ** r
        nu_a, nu_b = self.eigenvectors()
        R, _ = self.reg_pr([(nu_a, reg_fn(nu_a)), (nu_b, reg_fn(nu_b))], r)
        bf = self.coords_in_nu_pm(self.one_minus_phi_squared(R))
        return (c_plus, c_minus), bf
