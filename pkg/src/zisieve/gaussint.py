"""Exact arithmetic in the ring Z[i] of Gaussian integers.

Everything downstream (cusp classification, Kloosterman sums, sieve sweeps)
reduces to the primitives here: exact division with minimal-norm remainders,
extended gcd, canonical residue systems, factorization into Gaussian primes,
multiplicative functions, and lattice zeta partial sums.

Conventions:
  * units are {1, i, -1, -i};
  * the canonical associate of a nonzero element has re > 0, im >= 0
    (first quadrant including the positive real axis);
  * canonical residues mod c live in the fundamental rectangle of the
    Hermite-form basis of the lattice c*Z[i]: 0 <= re < norm(c)/g and
    0 <= im < g, where g = gcd of the components of c.  Division inside
    the Euclidean algorithm uses nearest-lattice-point quotients instead
    (minimal-norm remainders), which is what makes it terminate.
"""

from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

__all__ = [
    "GaussianInt",
    "Factorization",
    "MultiplicativeStats",
    "ZERO",
    "ONE",
    "I",
    "UNITS",
    "parse_gaussian",
    "divmod_nearest",
    "reduce_mod",
    "gcd",
    "xgcd",
    "is_coprime",
    "lcm",
    "solve_linear_congruence",
    "crt_pair",
    "residues",
    "mod_inverse",
    "is_gaussian_prime",
    "factorize",
    "divisors",
    "multiplicative_stats",
    "phi",
    "tau_ideal",
    "omega",
    "q0_part",
    "hecke_zeta_partial",
]


class GaussianInt:
    """An element a + bi of Z[i] with unbounded integer components."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        self.re = int(re)
        self.im = int(im)

    # -- basic structure ----------------------------------------------------

    def norm(self) -> int:
        """Field norm a^2 + b^2 (a nonnegative rational integer)."""
        return self.re * self.re + self.im * self.im

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __hash__(self):
        return hash((self.re, self.im))

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers leave Z[i]")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- associates ---------------------------------------------------------

    def canonical(self) -> "GaussianInt":
        """The canonical associate (re > 0, im >= 0); 0 maps to itself."""
        z = self
        for _ in range(4):
            if z.is_zero() or (z.re > 0 and z.im >= 0):
                return z
            z = z * I
        raise AssertionError("unreachable")

    def unit_to_canonical(self) -> "GaussianInt":
        """The unit u with u * self == self.canonical()."""
        z, u = self, ONE
        for _ in range(4):
            if z.is_zero() or (z.re > 0 and z.im >= 0):
                return u
            z, u = z * I, u * I
        raise AssertionError("unreachable")

    def is_associate(self, other: "GaussianInt") -> bool:
        return self.canonical() == _coerce(other).canonical()

    # -- divisibility -------------------------------------------------------

    def divides(self, other: "GaussianInt") -> bool:
        """True if self | other in Z[i]."""
        if self.is_zero():
            return other.is_zero()
        w = other * self.conj()
        n = self.norm()
        return w.re % n == 0 and w.im % n == 0

    def exact_div(self, d: "GaussianInt") -> "GaussianInt":
        """Quotient self / d, asserting exact divisibility."""
        d = _coerce(d)
        if d.is_zero():
            raise ZeroDivisionError("division by zero in Z[i]")
        w = self * d.conj()
        n = d.norm()
        if w.re % n or w.im % n:
            raise ValueError(f"{d} does not divide {self}")
        return GaussianInt(w.re // n, w.im // n)

    # -- conversion & display -----------------------------------------------

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def sort_key(self):
        """Deterministic total order: by norm, then angle within [0, 2pi)."""
        return (self.norm(), _angle_class(self.re, self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self) -> str:
        return f"GaussianInt({self.re}, {self.im})"


def _coerce(x):
    if isinstance(x, GaussianInt):
        return x
    if isinstance(x, int):
        return GaussianInt(x, 0)
    return NotImplemented


def _angle_class(re: int, im: int):
    # Exact angular order: quadrant index, then tan comparison via cross products.
    if re == 0 and im == 0:
        return (0, 0, 1)
    if re > 0 and im >= 0:
        q = 0
    elif re <= 0 and im > 0:
        q = 1
    elif re < 0 and im <= 0:
        q = 2
    else:
        q = 3
    # within a quadrant, angle increases with im/re; encode as exact fraction
    return (q, Fraction(im, re) if re != 0 else Fraction(0), 0)


ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
UNITS = (ONE, I, GaussianInt(-1, 0), GaussianInt(0, -1))


_GAUSS_RE = _re.compile(
    r"""^\s*
    (?:
        (?P<re>[+-]?\d+)\s*(?:(?P<sign>[+-])\s*(?P<im>\d*)\s*i)?   # a or a+bi
      | (?P<im_only>[+-]?\d*)\s*i                                  # bi
    )
    \s*$""",
    _re.VERBOSE,
)


def parse_gaussian(text: str) -> GaussianInt:
    """Parse 'a', 'a+bi', 'a-bi', 'bi', '-bi' (optional spaces, b may be implicit 1)."""
    m = _GAUSS_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian integer literal: {text!r}")
    if m.group("im_only") is not None:
        raw = m.group("im_only")
        if raw in ("", "+"):
            return I
        if raw == "-":
            return -I
        return GaussianInt(0, int(raw))
    re_part = int(m.group("re"))
    if m.group("sign") is None:
        return GaussianInt(re_part, 0)
    mag = m.group("im")
    im_part = int(mag) if mag else 1
    if m.group("sign") == "-":
        im_part = -im_part
    return GaussianInt(re_part, im_part)


# ---------------------------------------------------------------------------
# division, gcd, residues
# ---------------------------------------------------------------------------


def _round_half_up(num: int, den: int) -> int:
    """floor(num/den + 1/2) for den > 0, exact."""
    return (2 * num + den) // (2 * den)


def divmod_nearest(a: GaussianInt, b: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    """Quotient and remainder with norm(r) <= norm(b)/2 (nearest lattice point)."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero in Z[i]")
    w = a * b.conj()
    n = b.norm()
    q = GaussianInt(_round_half_up(w.re, n), _round_half_up(w.im, n))
    return q, a - q * b


def _hnf_basis(c: GaussianInt) -> tuple[int, int, int]:
    """Hermite-form basis of the lattice c*Z[i]: vectors (h, 0) and (p, g)
    with h = norm(c)/g and g = gcd(re, im).  Returns (h, p, g)."""
    a, b = c.re, c.im
    g = math.gcd(a, b)
    h = c.norm() // g
    # s, t with b*s + a*t = g, so that c*(s + t*i) = (a*s - b*t) + g*i
    s, t = _xgcd_int(b, a)
    p = a * s - b * t
    return h, p % h, g


def _xgcd_int(x: int, y: int) -> tuple[int, int]:
    """(s, t) with x*s + y*t = gcd(x, y) over the rational integers."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def reduce_mod(z: GaussianInt, c: GaussianInt) -> GaussianInt:
    """Canonical representative of z mod c*Z[i]: the unique rep in the
    fundamental rectangle 0 <= re < norm(c)/g, 0 <= im < g (g = gcd of the
    components of c)."""
    if c.is_zero():
        raise ZeroDivisionError("modulus zero")
    h, p, g = _hnf_basis(c)
    k = z.im // g
    y = z.im - k * g
    x = (z.re - k * p) % h
    return GaussianInt(x, y)


def xgcd(m: GaussianInt, n: GaussianInt) -> tuple[GaussianInt, GaussianInt, GaussianInt]:
    """Extended gcd: returns (g, s, t) with g = s*m + t*n, g a canonical
    associate dividing both arguments."""
    m, n = _coerce(m), _coerce(n)
    if m.is_zero() and n.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = m, n
    sa, sb = ONE, ZERO
    ta, tb = ZERO, ONE
    while not b.is_zero():
        q, r = divmod_nearest(a, b)
        a, b = b, r
        sa, sb = sb, sa - q * sb
        ta, tb = tb, ta - q * tb
    u = a.unit_to_canonical()
    return a * u, sa * u, ta * u


def gcd(m: GaussianInt, n: GaussianInt) -> GaussianInt:
    """Canonical-associate highest common factor."""
    m, n = _coerce(m), _coerce(n)
    if m.is_zero() and n.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = m, n
    while not b.is_zero():
        _, r = divmod_nearest(a, b)
        a, b = b, r
    return a.canonical()


def is_coprime(m: GaussianInt, n: GaussianInt) -> bool:
    return gcd(m, n) == ONE


def lcm(m: GaussianInt, n: GaussianInt) -> GaussianInt:
    if m.is_zero() or n.is_zero():
        raise ValueError("lcm with zero")
    return (m * n).exact_div(gcd(m, n)).canonical()


def solve_linear_congruence(
    a: GaussianInt, b: GaussianInt, m: GaussianInt
) -> tuple[GaussianInt, GaussianInt] | None:
    """Solve a*x = b mod m*Z[i].  Returns (x0, step) where the full solution
    set mod m is x0 + step*Z[i] reduced mod m, or None if insoluble.
    step = m / gcd(a, m)."""
    if m.is_zero():
        raise ZeroDivisionError("modulus zero")
    if m.is_unit():
        return ZERO, ONE
    g, s, _ = xgcd(a, m)
    if not g.divides(b):
        return None
    step = m.exact_div(g)
    x0 = reduce_mod(s * b.exact_div(g), step)
    return x0, step.canonical()


def crt_pair(
    r1: GaussianInt, m1: GaussianInt, r2: GaussianInt, m2: GaussianInt
) -> tuple[GaussianInt, GaussianInt] | None:
    """Simultaneous solution of x = r1 mod m1, x = r2 mod m2 (moduli need not
    be coprime).  Returns (x, lcm) or None when incompatible."""
    sol = solve_linear_congruence(m1, r2 - r1, m2)
    if sol is None:
        return None
    t0, _ = sol
    el = lcm(m1, m2)
    return reduce_mod(r1 + t0 * m1, el), el


def residues(c: GaussianInt, coprime_only: bool = False) -> list[GaussianInt]:
    """Canonical residue system mod c*Z[i]: exactly norm(c) representatives
    (phi(c) with coprime_only), sorted deterministically."""
    if c.is_zero():
        raise ValueError("modulus zero")
    h, _, g = _hnf_basis(c)
    reps = [GaussianInt(x, y) for y in range(g) for x in range(h)]
    assert len(reps) == c.norm()
    reps.sort(key=GaussianInt.sort_key)
    if coprime_only:
        reps = [r for r in reps if is_coprime(r, c)]
    return reps


def mod_inverse(m: GaussianInt, c: GaussianInt) -> GaussianInt:
    """The canonical residue m* with m*m* = 1 mod c*Z[i]."""
    if c.is_zero():
        raise ValueError("modulus zero")
    g, s, _ = xgcd(m, c)
    if g != ONE:
        raise ValueError(f"{m} is not invertible mod {c}: common factor {g}")
    return reduce_mod(s, c)


# ---------------------------------------------------------------------------
# primes and factorization
# ---------------------------------------------------------------------------


def _is_rational_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_gaussian_prime(p: GaussianInt) -> bool:
    """Primality in Z[i]: norm is a rational prime, or the element is an
    associate of an inert rational prime q = 3 mod 4."""
    n = p.norm()
    if n <= 1:
        return False
    if _is_rational_prime(n):
        return True
    c = p.canonical()
    return c.im == 0 and c.re % 4 == 3 and _is_rational_prime(c.re)


def _sqrt_minus_one_mod(p: int) -> int:
    """x with x^2 = -1 mod p, for rational prime p = 1 mod 4."""
    for a in range(2, p):
        x = pow(a, (p - 1) // 4, p)
        if (x * x) % p == p - 1:
            return x
    raise AssertionError(f"no sqrt(-1) mod {p}")


def _gaussian_prime_above(p: int) -> GaussianInt:
    """A canonical Gaussian prime dividing the rational prime p."""
    if p == 2:
        return GaussianInt(1, 1)
    if p % 4 == 3:
        return GaussianInt(p, 0)
    x = _sqrt_minus_one_mod(p)
    return gcd(GaussianInt(p, 0), GaussianInt(x, 1))


@dataclass(frozen=True)
class Factorization:
    """unit * prod(prime^exponent) with canonical, pairwise non-associate primes."""

    unit: GaussianInt
    factors: tuple[tuple[GaussianInt, int], ...]

    def value(self) -> GaussianInt:
        out = self.unit
        for p, e in self.factors:
            out = out * p**e
        return out

    def __str__(self) -> str:
        parts = [str(self.unit)] if self.unit != ONE or not self.factors else []
        parts += [f"({p})^{e}" if e > 1 else f"({p})" for p, e in self.factors]
        return " * ".join(parts) if parts else "1"


def factorize(n: GaussianInt) -> Factorization:
    """Factor n != 0 into canonical Gaussian primes by trial division,
    ordered by (norm, angle); certified by reconstruction."""
    n = _coerce(n)
    if n.is_zero():
        raise ValueError("cannot factor 0")
    remaining = n
    factors: list[tuple[GaussianInt, int]] = []
    norm = n.norm()
    # rational prime support of the norm
    m = norm
    rational: list[int] = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            rational.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        rational.append(m)
    for p in rational:
        for prime in _primes_over(p):
            e = 0
            while prime.divides(remaining):
                remaining = remaining.exact_div(prime)
                e += 1
            if e:
                factors.append((prime, e))
    if not remaining.is_unit():
        raise AssertionError(f"factorization of {n} left non-unit {remaining}")
    factors.sort(key=lambda pe: pe[0].sort_key())
    result = Factorization(unit=remaining, factors=tuple(factors))
    if result.value() != n:
        raise AssertionError(f"factorization of {n} does not reconstruct")
    for prime, _ in factors:
        if not is_gaussian_prime(prime):
            raise AssertionError(f"uncertified factor {prime}")
    return result


def _primes_over(p: int) -> list[GaussianInt]:
    """Canonical Gaussian primes above the rational prime p (1 or 2 of them)."""
    if p == 2:
        return [GaussianInt(1, 1)]
    if p % 4 == 3:
        return [GaussianInt(p, 0)]
    pi = _gaussian_prime_above(p)
    return sorted({pi.canonical(), pi.conj().canonical()}, key=GaussianInt.sort_key)


def divisors(n: GaussianInt, with_associates: bool = False) -> Iterator[GaussianInt]:
    """All canonical divisors of n (one per divisor ideal); with_associates
    multiplies each by the four units."""
    fac = factorize(n)
    stack = [ONE]
    for p, e in fac.factors:
        stack = [d * p**k for d in stack for k in range(e + 1)]
    stack = [d.canonical() for d in stack]
    stack.sort(key=GaussianInt.sort_key)
    for d in stack:
        if with_associates:
            for u in UNITS:
                yield d * u
        else:
            yield d


@dataclass(frozen=True)
class MultiplicativeStats:
    tau_ideal: int
    tau_assoc: int
    omega: int
    phi: int


def multiplicative_stats(n: GaussianInt) -> MultiplicativeStats:
    """Divisor-ideal count, associate-counted divisor count, distinct prime
    ideal count, and Euler phi of n != 0."""
    fac = factorize(n)
    tau = 1
    ph = 1
    for p, e in fac.factors:
        tau *= e + 1
        np_ = p.norm()
        ph *= np_ ** (e - 1) * (np_ - 1)
    return MultiplicativeStats(tau_ideal=tau, tau_assoc=4 * tau, omega=len(fac.factors), phi=ph)


def phi(n: GaussianInt) -> int:
    return multiplicative_stats(n).phi


def tau_ideal(n: GaussianInt) -> int:
    return multiplicative_stats(n).tau_ideal


def omega(n: GaussianInt) -> int:
    return multiplicative_stats(n).omega


def q0_part(C: GaussianInt, q0: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    """Split C = C_part * C_coprime where C_part collects the prime powers of C
    whose primes divide q0 (canonical), and gcd(C_coprime, q0 * C_part) ~ 1.
    Returns (C_part, C_coprime)."""
    C, q0 = _coerce(C), _coerce(q0)
    if C.is_zero() or q0.is_zero():
        raise ValueError("q0_part requires nonzero arguments")
    r = C
    while True:
        g = gcd(r, q0)
        if g == ONE:
            break
        r = r.exact_div(g)
    part = C.exact_div(r).canonical()
    coprime = C.exact_div(part)
    return part, coprime


# ---------------------------------------------------------------------------
# lattice zeta partial sums
# ---------------------------------------------------------------------------


def hecke_zeta_partial(s: complex, k: int, X: float) -> tuple[complex, float]:
    """Partial Hecke zeta sum (1/4) * sum_{0 < |alpha|^2 <= X} lam^k(alpha) |alpha|^(-2s)
    with lam^k(alpha) = (alpha/|alpha|)^(4k), plus a rigorous bound on the
    omitted tail by integral comparison.  Requires Re(s) > 1 and X >= 2."""
    sigma = complex(s).real
    if sigma <= 1:
        raise ValueError("hecke_zeta_partial requires Re(s) > 1 (series diverges)")
    if X < 2:
        raise ValueError("cutoff X must be >= 2")
    s = complex(s)
    bound = math.isqrt(int(X))
    xs = np.arange(-bound, bound + 1, dtype=np.int64)
    a, b = np.meshgrid(xs, xs, indexing="ij")
    n2 = a * a + b * b
    mask = (n2 > 0) & (n2 <= X)
    a, b, n2 = a[mask], b[mask], n2[mask].astype(np.float64)
    if k == 0:
        char = np.ones_like(n2, dtype=np.complex128)
    else:
        # (alpha/|alpha|)^(4k) = (alpha^4 / |alpha|^4)^k, alpha^4 computed exactly
        z2r = a * a - b * b
        z2i = 2 * a * b
        z4r = z2r * z2r - z2i * z2i
        z4i = 2 * z2r * z2i
        char = ((z4r + 1j * z4i) / (n2 * n2)) ** k
    value = complex(0.25 * np.sum(char * n2 ** (-s)))

    # tail bound: sum exactly over X < |alpha|^2 <= X1, integral comparison beyond
    X1 = max(float(X), 64.0)
    tail = 0.0
    if X1 > X:
        bound1 = math.isqrt(int(X1))
        xs1 = np.arange(-bound1, bound1 + 1, dtype=np.int64)
        a1, b1 = np.meshgrid(xs1, xs1, indexing="ij")
        m2 = (a1 * a1 + b1 * b1).astype(np.float64)
        seg = (m2 > X) & (m2 <= X1)
        tail += 0.25 * float(np.sum(m2[seg] ** (-sigma)))
    # every alpha with |alpha| > R has its unit square inside {|z| > R - sqrt(2)}
    u0 = math.sqrt(X1) - math.sqrt(2.0)
    assert u0 > 0
    tail += 0.25 * 2 * math.pi * (
        u0 ** (2 - 2 * sigma) / (2 * sigma - 2) + math.sqrt(2.0) * u0 ** (1 - 2 * sigma) / (2 * sigma - 1)
    )
    return value, tail


# ---------------------------------------------------------------------------
# vectorized helpers (int64 component arrays) for the exponential-sum loops
# ---------------------------------------------------------------------------


def norm_i64(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    return re * re + im * im


def _round_half_up_i64(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return np.floor_divide(2 * num + den, 2 * den)


def divmod_nearest_i64(ar, ai, br, bi):
    """Vectorized nearest-lattice division; b must be nonzero everywhere."""
    n = br * br + bi * bi
    wr = ar * br + ai * bi
    wi = ai * br - ar * bi
    qr = _round_half_up_i64(wr, n)
    qi = _round_half_up_i64(wi, n)
    rr = ar - (qr * br - qi * bi)
    ri = ai - (qr * bi + qi * br)
    return qr, qi, rr, ri


def xgcd_i64(ar, ai, br, bi, max_iter: int = 64):
    """Vectorized extended Euclid on int64 component arrays.

    Returns (gr, gi, sr, si) with g = s*a mod b-divisible remainder chain,
    i.e. g = s*a + t*b for some t (t not returned), g NOT canonicalized.
    Entries where both inputs are zero return g = 0.
    """
    ar = np.array(ar, dtype=np.int64, copy=True)
    ai = np.array(ai, dtype=np.int64, copy=True)
    br = np.array(br, dtype=np.int64, copy=True)
    bi = np.array(bi, dtype=np.int64, copy=True)
    sr = np.ones_like(ar)
    si = np.zeros_like(ar)
    s2r = np.zeros_like(ar)
    s2i = np.zeros_like(ar)
    for _ in range(max_iter):
        active = (br != 0) | (bi != 0)
        if not active.any():
            break
        brA, biA = br[active], bi[active]
        qr, qi, rr, ri = divmod_nearest_i64(ar[active], ai[active], brA, biA)
        ar[active], ai[active] = brA, biA
        br[active], bi[active] = rr, ri
        nsr = sr[active] - (qr * s2r[active] - qi * s2i[active])
        nsi = si[active] - (qr * s2i[active] + qi * s2r[active])
        sr[active], si[active] = s2r[active], s2i[active]
        s2r[active], s2i[active] = nsr, nsi
    else:
        if ((br != 0) | (bi != 0)).any():
            raise AssertionError("vectorized gcd did not terminate")
    return ar, ai, sr, si


def reduce_floor_i64(zr, zi, cr, ci):
    """Vectorized fundamental-parallelogram reduction mod the lattice c*Z[i]
    (floor-based; used for deterministic double-coset keys)."""
    n = cr * cr + ci * ci
    wr = zr * cr + zi * ci
    wi = zi * cr - zr * ci
    xr = np.floor_divide(wr, n)
    xi = np.floor_divide(wi, n)
    rr = zr - (xr * cr - xi * ci)
    ri = zi - (xr * ci + xi * cr)
    return rr, ri
