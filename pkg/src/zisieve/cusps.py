"""Cusp geometry for the Hecke congruence subgroup of level q0 in SL(2,Z[i]).

A cusp is a point of Q(i) together with infinity.  Every cusp is equivalent
under the group action to a normalized fraction u/w with w | q0, u != 0,
gcd(u, w) ~ 1 and gcd(u, q0) ~ 1; the normalized data plus the arithmetic
invariants (width generator, mu-invariant, stabilizer index, scaling matrix)
are packaged in a CuspFrame.

Scaling matrices are always of the shape pi * tau_v, where pi is the integral
unimodular matrix [[u, -wt], [w, ut]] with u*ut = 1 mod q0, and tau_v =
diag(sqrt(v), 1/sqrt(v)) for the width generator v.  Only exact data (pi, v)
is stored; sqrt(v) is realized as the principal square root of the canonical
associate when a complex matrix is required.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .gaussint import (
    GaussianInt,
    I,
    ONE,
    UNITS,
    ZERO,
    divisors,
    factorize,
    gcd,
    hecke_zeta_partial,
    mod_inverse,
    parse_gaussian,
    phi,
    reduce_mod,
    residues,
    solve_linear_congruence,
    xgcd,
)

__all__ = [
    "GMat",
    "Cusp",
    "CuspFrame",
    "normalize_cusp",
    "equivalence_witness",
    "cusps_equivalent",
    "class_count_formula",
    "class_representatives",
    "index_and_covolume",
    "build_frame",
    "frame_for",
    "stabilizer_data",
    "chi_indicator",
    "allowed_reduced_moduli",
    "allowed_moduli",
    "modulus_scale",
]

G = GaussianInt


# ---------------------------------------------------------------------------
# integral 2x2 matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GMat:
    """2x2 matrix over Z[i]."""

    a: GaussianInt
    b: GaussianInt
    c: GaussianInt
    d: GaussianInt

    def det(self) -> GaussianInt:
        return self.a * self.d - self.b * self.c

    def __mul__(self, other: "GMat") -> "GMat":
        return GMat(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GMat":
        if self.det() != ONE:
            raise ValueError("inverse implemented only for determinant 1")
        return GMat(self.d, -self.b, -self.c, self.a)

    def in_gamma0(self, q0: GaussianInt) -> bool:
        return self.det() == ONE and q0.divides(self.c)

    def apply(self, cusp: "Cusp") -> "Cusp":
        u, w = cusp.as_vector()
        return Cusp.from_vector(self.a * u + self.b * w, self.c * u + self.d * w)

    def entries(self) -> tuple[GaussianInt, GaussianInt, GaussianInt, GaussianInt]:
        return (self.a, self.b, self.c, self.d)

    @staticmethod
    def identity() -> "GMat":
        return GMat(ONE, ZERO, ZERO, ONE)

    @staticmethod
    def translation(z: GaussianInt) -> "GMat":
        return GMat(ONE, z, ZERO, ONE)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


# ---------------------------------------------------------------------------
# cusps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cusp:
    """A point of Q(i) or infinity, stored as a primitive fraction u/w with w
    a canonical associate; infinity is 1/0."""

    u: GaussianInt
    w: GaussianInt

    @staticmethod
    def infinity() -> "Cusp":
        return Cusp(ONE, ZERO)

    @staticmethod
    def from_vector(u: GaussianInt, w: GaussianInt) -> "Cusp":
        if u.is_zero() and w.is_zero():
            raise ValueError("0/0 is not a cusp")
        if w.is_zero():
            return Cusp(ONE, ZERO)
        g = gcd(u, w)
        u, w = u.exact_div(g), w.exact_div(g)
        eps = w.unit_to_canonical()
        return Cusp(u * eps, w * eps)

    @staticmethod
    def parse(text: str) -> "Cusp":
        text = text.strip()
        if text.lower() in ("inf", "infinity", "oo"):
            return Cusp.infinity()
        if "/" in text:
            num, den = text.split("/", 1)
            return Cusp.from_vector(parse_gaussian(num), parse_gaussian(den))
        return Cusp.from_vector(parse_gaussian(text), ONE)

    def is_infinity(self) -> bool:
        return self.w.is_zero()

    def as_vector(self) -> tuple[GaussianInt, GaussianInt]:
        return self.u, self.w

    def __str__(self) -> str:
        if self.is_infinity():
            return "inf"
        return f"{self.u}/{self.w}"


def _small_gaussians_sorted(max_norm: int) -> list[GaussianInt]:
    out = []
    bound = int(max_norm**0.5) + 1
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            z = G(x, y)
            if z.norm() <= max_norm:
                out.append(z)
    out.sort(key=GaussianInt.sort_key)
    return out


def equivalence_witness(source: Cusp, target: Cusp, q0: GaussianInt) -> GMat | None:
    """A group element gamma with gamma(source) = target, or None if the cusps
    are inequivalent.  Solves gamma * (u2, w2)^T = eps * (u1, w1)^T over the
    four units eps, exactly."""
    if q0.is_zero():
        raise ValueError("q0 must be nonzero")
    u2, w2 = source.as_vector()
    u1, w1 = target.as_vector()
    for eps in UNITS:
        t1, t2 = eps * u1, eps * w1
        # upper row: a*u2 + b*w2 = t1, family (a0 + kappa*w2, b0 - kappa*u2)
        g1, s1, r1 = xgcd(u2, w2)
        if g1 != ONE:
            raise AssertionError("cusp vector not primitive")
        a0, b0 = s1 * t1, r1 * t1
        # lower row: (q0*u2)*k + w2*d = t2, family (k0 + lam*w2/g2, d0 - lam*q0*u2/g2)
        g2, s2, r2 = xgcd(q0 * u2, w2)
        if not g2.divides(t2):
            continue
        scale = t2.exact_div(g2)
        k0, d0 = s2 * scale, r2 * scale
        # determinant 1 reduces to a linear equation in the two family params:
        #   t2*kappa - (q0*t1/g2)*lam = 1 - a0*d0 + b0*q0*k0
        coeff1 = t2
        coeff2 = -(q0 * t1).exact_div(g2)
        rhs = ONE - a0 * d0 + b0 * q0 * k0
        if coeff1.is_zero() and coeff2.is_zero():
            if not rhs.is_zero():
                continue
            kappa = lam = ZERO
        else:
            g3, s3, r3 = xgcd(coeff1, coeff2)
            if not g3.divides(rhs):
                continue
            scale3 = rhs.exact_div(g3)
            kappa, lam = s3 * scale3, r3 * scale3
        a = a0 + kappa * w2
        b = b0 - kappa * u2
        k = k0 + lam * w2.exact_div(g2)
        d = d0 - lam * (q0 * u2).exact_div(g2)
        gamma = GMat(a, b, q0 * k, d)
        if gamma.det() == ONE and gamma.apply(source) == target:
            return gamma
    return None


def is_normalized(u: GaussianInt, w: GaussianInt, q0: GaussianInt) -> bool:
    return (
        not w.is_zero()
        and w == w.canonical()
        and w.divides(q0)
        and not u.is_zero()
        and gcd(u, w) == ONE
        and gcd(u, q0) == ONE
    )


def normalize_cusp(cusp: Cusp, q0: GaussianInt) -> tuple[GaussianInt, GaussianInt, GMat]:
    """An equivalent normalized cusp u/w (w | q0, u != 0, gcd(u, w) ~ 1,
    gcd(u, q0) ~ 1) together with a witness gamma in the group mapping the
    input cusp to u/w."""
    if q0.is_zero():
        raise ValueError("q0 must be nonzero")
    t, vden = cusp.as_vector()
    if is_normalized(t, vden, q0):
        return t, vden, GMat.identity()

    w = gcd(vden, q0) if not vden.is_zero() else q0.canonical()
    big_a = q0.exact_div(w) * t
    big_b = vden.exact_div(w) if not vden.is_zero() else ZERO
    g, s, r = xgcd(big_a, big_b) if not (big_a.is_zero() and big_b.is_zero()) else (ONE, ONE, ZERO)
    if g != ONE:
        raise AssertionError("Bezout pair for cusp normalization is not unimodular")
    kappa0, delta0 = s, r
    # walk the solution family until delta is coprime to q0
    kappa = delta = None
    for mu in _small_gaussians_sorted(4 * q0.norm() + 16):
        kd, dd = kappa0 + mu * big_b, delta0 - mu * big_a
        if gcd(dd, q0) == ONE if not dd.is_zero() else False:
            kappa, delta = kd, dd
            break
    if kappa is None:
        raise AssertionError("no coprime delta in normalization family")
    g2, s2, r2 = xgcd(delta, q0 * kappa) if not (delta.is_zero() and kappa.is_zero()) else (ONE, ONE, ZERO)
    if g2 != ONE:
        raise AssertionError("(delta, q0*kappa) not coprime")
    alpha, beta = s2, -r2
    gamma = GMat(alpha, beta, q0 * kappa, delta)
    assert gamma.det() == ONE and gamma.in_gamma0(q0)
    u_raw = alpha * t + beta * vden
    # denominator of the image is w exactly
    assert (q0 * kappa * t + delta * vden) == w

    if u_raw.is_zero():
        gamma = GMat.translation(ONE) * gamma
        u_raw = u_raw + w

    # translate to a small numerator coprime to q0
    base = reduce_mod(u_raw, w * q0)
    chosen = None
    for j in _small_gaussians_sorted(4 * q0.norm() + 16):
        cand = base + j * w
        if not cand.is_zero() and gcd(cand, q0) == ONE:
            chosen = cand
            break
    if chosen is None:
        raise AssertionError("no coprime numerator in translation family")
    k = (chosen - u_raw).exact_div(w)
    gamma = GMat.translation(k) * gamma
    u = chosen

    eps = w.unit_to_canonical()
    u, w = u * eps, w * eps
    assert is_normalized(u, w, q0)
    assert gamma.apply(cusp) == Cusp.from_vector(u, w)
    return u, w, gamma


def cusps_equivalent(c1: Cusp, c2: Cusp, q0: GaussianInt) -> bool:
    """Group-equivalence test: normalized denominators associate and the
    numerators congruent up to sign mod gcd(w, q0/w)."""
    u1, w1, _ = normalize_cusp(c1, q0)
    u2, w2, _ = normalize_cusp(c2, q0)
    if w1 != w2:  # both canonical, so associate means equal
        return False
    d = gcd(w1, q0.exact_div(w1))
    ratio = w1.exact_div(w2)  # a unit
    lhs = u2 * ratio
    return d.divides(lhs - u1) or d.divides(lhs + u1)


def class_count_formula(q0: GaussianInt) -> int:
    """Number of cusp classes: the divisor-sum formula with divisors counted
    together with their associates (equivalently, 4x the canonical sums / 8)."""
    total = Fraction(0)
    for w in divisors(q0.canonical()):
        d = gcd(w, q0.canonical().exact_div(w))
        ph = phi(d)
        total += Fraction(4 * ph, 8)
        if d.divides(G(2)):
            total += Fraction(4 * ph, 8)
    assert total.denominator == 1
    return int(total)


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


def _minimal_norm_mod(z: GaussianInt, c: GaussianInt) -> GaussianInt:
    """Minimal-norm representative of z mod c*Z[i] (deterministic tie-break)."""
    from .gaussint import divmod_nearest

    q, _ = divmod_nearest(z, c)
    best = None
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            r = z - (q + G(dx, dy)) * c
            key = (r.norm(), 0 if (r.is_zero() or (r.re > 0 and r.im >= 0)) else 1, -r.re, -r.im)
            if best is None or key < best[0]:
                best = (key, r)
    return best[1]


@dataclass(frozen=True)
class CuspFrame:
    """A normalized cusp of the level-q0 group with its scaling-matrix data.

    The scaling matrix is pi * tau_v, with pi = [[u, -wt], [w, ut]] integral
    of determinant one, u*ut = 1 mod q0, and v the width generator.  beta_num
    holds z0 with beta = -i*z0/v for index-4 stabilizers (None otherwise).
    """

    q0: GaussianInt
    u: GaussianInt
    w: GaussianInt
    ut: GaussianInt
    wt: GaussianInt
    v: GaussianInt
    mu_inv: GaussianInt
    stab_index: int
    beta_num: GaussianInt | None

    # -- construction invariants --------------------------------------------

    def __post_init__(self):
        assert self.pi().det() == ONE
        assert self.q0.divides(self.u * self.ut - ONE)
        assert (self.w * self.v).is_associate(self.mu_inv)
        assert self.stab_index in (2, 4)

    def cusp(self) -> Cusp:
        return Cusp.from_vector(self.u, self.w)

    def pi(self) -> GMat:
        return GMat(self.u, -self.wt, self.w, self.ut)

    @property
    def width_gen(self) -> GaussianInt:
        return self.v

    @property
    def sqrt_v(self) -> complex:
        return cmath.sqrt(complex(self.v))

    def scaling_complex(self):
        """The scaling matrix as a complex 2x2 (rows as tuples)."""
        s = self.sqrt_v
        pi = self.pi()
        return (
            (complex(pi.a) * s, complex(pi.b) / s),
            (complex(pi.c) * s, complex(pi.d) / s),
        )

    @property
    def beta(self) -> complex | None:
        if self.beta_num is None:
            return None
        return complex(-I * self.beta_num) / complex(self.v)

    def beta_phase(self, omega: GaussianInt) -> Fraction:
        """Re(beta * omega) as an exact rational (index-4 frames only)."""
        if self.beta_num is None:
            raise ValueError("frame has trivial stabilizer twist")
        num = (-I * self.beta_num * omega) * self.v.conj()
        return Fraction(num.re, self.v.norm())

    def key(self) -> tuple:
        return (str(self.q0), str(self.u), str(self.w))

    def to_dict(self) -> dict:
        return {
            "q0": str(self.q0),
            "cusp": str(self.cusp()),
            "u": str(self.u),
            "w": str(self.w),
            "u_tilde": str(self.ut),
            "w_tilde": str(self.wt),
            "width_gen": str(self.v),
            "mu_inv": str(self.mu_inv),
            "stab_index": self.stab_index,
            "beta": None if self.beta is None else [self.beta.real, self.beta.imag],
            "pi_matrix": [[str(x) for x in (self.u, -self.wt)], [str(x) for x in (self.w, self.ut)]],
        }

    def __str__(self) -> str:
        return f"CuspFrame({self.cusp()} @ q0={self.q0})"


def build_frame(u: GaussianInt, w: GaussianInt, q0: GaussianInt) -> CuspFrame:
    """Frame for an already-normalized cusp u/w."""
    q0 = q0.canonical()
    if not is_normalized(u, w, q0):
        raise ValueError(f"{u}/{w} is not normalized for level {q0}")
    ut = mod_inverse(u, q0)
    wt = (ONE - u * ut).exact_div(w)
    q_over_w = q0.exact_div(w)
    d = gcd(w, q_over_w)
    v = q_over_w.exact_div(d).canonical()
    width = q0.exact_div(gcd(w * w, q0)).canonical()
    assert width == v
    mu_inv = (w * v).canonical()
    q0_mu = q0.exact_div(w * v)
    stab4 = q0_mu.divides(G(2))
    assert q0_mu.is_associate(d)
    beta_num = None
    if stab4:
        sol = solve_linear_congruence(w, G(2) * I * ut, q_over_w)
        if sol is None:
            raise AssertionError("stabilizer congruence insoluble despite index-4 criterion")
        z0, step = sol
        assert step.is_associate(v)
        beta_num = _minimal_norm_mod(z0, step)
        # certify: pi * h[i]n[v*beta] * pi^{-1} is in the group; v*beta = -i*z0
        inner = GMat(I, beta_num, ZERO, -I)
        pi = GMat(u, -wt, w, ut)
        tw = pi * inner * pi.inv()
        assert tw.in_gamma0(q0), "stabilizer twist certification failed"
    return CuspFrame(
        q0=q0,
        u=u,
        w=w,
        ut=ut,
        wt=wt,
        v=v,
        mu_inv=mu_inv,
        stab_index=4 if stab4 else 2,
        beta_num=beta_num,
    )


def frame_for(cusp: Cusp, q0: GaussianInt) -> tuple[CuspFrame, GMat]:
    """Normalized frame for an arbitrary cusp plus the witness mapping the
    cusp to the frame's normalized representative."""
    u, w, gamma = normalize_cusp(cusp, q0.canonical())
    return build_frame(u, w, q0.canonical()), gamma


def stabilizer_data(frame: CuspFrame) -> tuple[int, complex | None]:
    """(stabilizer index, beta) with the certification re-run."""
    rebuilt = build_frame(frame.u, frame.w, frame.q0)
    return rebuilt.stab_index, rebuilt.beta


def class_representatives(q0: GaussianInt) -> list[CuspFrame]:
    """Pairwise-inequivalent frames covering every cusp class."""
    q0 = q0.canonical()
    frames: list[CuspFrame] = []
    for w in divisors(q0):
        d = gcd(w, q0.exact_div(w))
        reps = residues(d, coprime_only=True)
        chosen: list[GaussianInt] = []
        seen: set[GaussianInt] = set()
        for r in reps:
            if r in seen:
                continue
            seen.add(r)
            seen.add(reduce_mod(-r, d))
            chosen.append(r)
        for r in chosen:
            lifted = None
            for j in _small_gaussians_sorted(4 * q0.norm() + 16):
                cand = r + j * d
                if not cand.is_zero() and gcd(cand, q0) == ONE:
                    lifted = cand
                    break
            if lifted is None:
                raise AssertionError("no coprime lift for cusp class numerator")
            frames.append(build_frame(lifted, w, q0))
    expected = class_count_formula(q0)
    if len(frames) != expected:
        raise AssertionError(
            f"class enumeration produced {len(frames)} frames, formula says {expected}"
        )
    return frames


def index_and_covolume(q0: GaussianInt, zeta2: complex | None = None) -> tuple[int, float]:
    """Group index in SL(2,Z[i]) (exact) and the covolume 2/pi^2 * zeta * index."""
    q0 = q0.canonical()
    index = Fraction(q0.norm())
    for p, _ in factorize(q0).factors:
        index *= Fraction(p.norm() + 1, p.norm())
    assert index.denominator == 1
    if zeta2 is None:
        zeta2 = hecke_zeta_partial(2.0, 0, 1e6)[0]
    vol = 2.0 / (math.pi**2) * complex(zeta2).real * int(index)
    return int(index), vol


# ---------------------------------------------------------------------------
# admissible moduli
# ---------------------------------------------------------------------------


def chi_indicator(f1: CuspFrame, f2: CuspFrame, A: GaussianInt, D: GaussianInt, C: GaussianInt) -> bool:
    """Exact membership test: does the Bruhat cell element built from the
    residue pair (A, D) at reduced modulus C come from a group element."""
    prod = A * D - ONE
    if not C.divides(prod):
        return False
    B = prod.exact_div(C)
    m = GMat(A, B, C, D)
    gamma = f1.pi() * m * f2.pi().inv()
    return gamma.in_gamma0(f1.q0)


def _admissible_pairs(f1: CuspFrame, f2: CuspFrame, C: GaussianInt):
    """All residue pairs (A mod v1*C, D mod v2*C) with A*D = 1 mod C and the
    membership indicator equal to one."""
    v1, v2 = f1.v, f2.v
    m1, m2 = v1 * C, v2 * C
    for A in residues(m1):
        if C.is_unit():
            d0 = ZERO
        else:
            if gcd(A, C) != ONE:
                continue
            d0 = mod_inverse(reduce_mod(A, C), C)
        for t in residues(v2):
            D = reduce_mod(d0 + t * C, m2)
            if C.divides(A * D - ONE) and chi_indicator(f1, f2, A, D, C):
                yield A, D


def admissible_cell_nonempty(f1: CuspFrame, f2: CuspFrame, C: GaussianInt) -> bool:
    for _ in _admissible_pairs(f1, f2, C):
        return True
    return False


def modulus_scale(f1: CuspFrame, f2: CuspFrame) -> complex:
    """The fixed branch sqrt(v1)*sqrt(v2); every admissible modulus is C times
    this number with C a Gaussian integer."""
    return f1.sqrt_v * f2.sqrt_v


def allowed_reduced_moduli(f1: CuspFrame, f2: CuspFrame, X: float) -> list[GaussianInt]:
    """Reduced moduli C (the actual modulus is c = C * sqrt(v1*v2)) with
    |c| <= X and a nonempty cell, sorted by norm then angle."""
    if f1.q0 != f2.q0:
        raise ValueError("frames have different levels")
    if X < 1:
        raise ValueError("cutoff X must be >= 1")
    scale2 = abs(complex(f1.v * f2.v)) ** 0.5
    max_norm = int(X * X / scale2 + 1e-9)
    out = []
    for C in _small_gaussians_sorted(max_norm):
        if C.is_zero() or C.norm() * scale2 > X * X + 1e-9:
            continue
        if admissible_cell_nonempty(f1, f2, C):
            out.append(C)
    return out


def _gaussian_sqrt(s: GaussianInt) -> GaussianInt | None:
    """A Gaussian integer sigma with sigma^2 = s, if one exists."""
    from .gaussint import factorize

    if s.is_zero():
        return ZERO
    fac = factorize(s)
    root = ONE
    for p, e in fac.factors:
        if e % 2:
            return None
        root = root * p ** (e // 2)
    for unit in UNITS:
        cand = root * unit
        if cand * cand == s:
            return cand
    return None


def allowed_moduli(f1: CuspFrame, f2: CuspFrame, X: float) -> list[GaussianInt]:
    """Admissible moduli c with |c| <= X as exact Gaussian integers.  This is
    always possible for a same-cusp pair (c = C*v); for cross pairs whose
    width product is not a perfect square the modulus lattice is irrational
    and allowed_reduced_moduli must be used instead."""
    reduced = allowed_reduced_moduli(f1, f2, X)
    s = f1.v * f2.v
    sigma = _gaussian_sqrt(s)
    if sigma is None:
        raise ValueError(
            f"modulus lattice sqrt({s})*Z[i] has no Gaussian generator; "
            "use allowed_reduced_moduli"
        )
    branch = modulus_scale(f1, f2)
    if abs(complex(sigma) - branch) > abs(complex(sigma) + branch):
        sigma = -sigma
    return [C * sigma for C in reduced]


@lru_cache(maxsize=None)
def _frame_cache(q0_key: str, u_key: str, w_key: str) -> CuspFrame:
    return build_frame(parse_gaussian(u_key), parse_gaussian(w_key), parse_gaussian(q0_key))


def cached_frame(frame: CuspFrame) -> CuspFrame:
    return _frame_cache(str(frame.q0), str(frame.u), str(frame.w))
