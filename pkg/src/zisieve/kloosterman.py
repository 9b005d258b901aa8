"""Kloosterman sums over Z[i]: the classical sum, the same-cusp sum via the
restricted residue-pair representation, the general two-cusp sum via residue
enumeration with an exact membership indicator, a factorization into a level
part and a simple sum, and a height-bounded double-coset enumeration that
serves as the independent oracle for all of them.

All evaluation routes are normalized to the frames' canonical scaling
matrices (pi * tau_v with the mod-q0 inverse normalization), so they agree
with each other exactly rather than up to a unimodular twist.  The raw
same-cusp value for the diagonal scaling matrix [[u sqrt(v), 0],
[w sqrt(v), 1/(u sqrt(v))]] is available via scaling="diagonal"; the two
conventions differ by the documented translation twist.

Phases are assembled in exact integer arithmetic (numerator/denominator
pairs), reduced mod 1, and only then rounded; the unit complex terms are
accumulated with exactly rounded summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cusps import CuspFrame, GMat, _admissible_pairs, build_frame, chi_indicator, equivalence_witness
from .gaussint import (
    GaussianInt,
    I,
    ONE,
    UNITS,
    ZERO,
    crt_pair,
    gcd,
    lcm,
    mod_inverse,
    multiplicative_stats,
    norm_i64,
    q0_part,
    reduce_floor_i64,
    reduce_mod,
    residues,
    xgcd_i64,
)
from .report import SweepReport

__all__ = [
    "KloostermanValue",
    "DeltaTerm",
    "BruteForceResult",
    "DEFAULT_HEIGHTS",
    "kloosterman_classical",
    "kloosterman_samecusp",
    "samecusp_moduli_admissible",
    "kloosterman_general",
    "kloosterman_factor",
    "kloosterman_bruteforce",
    "delta_bruteforce",
    "delta_term",
    "gauss_sum_quadratic",
    "kloosterman_matrix_classical",
    "kloosterman_matrix_samecusp",
    "check_bounds",
]

G = GaussianInt
TWO_PI = 2.0 * math.pi

DEFAULT_HEIGHTS = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class KloostermanValue:
    """A complex exponential-sum value with its term count and a conservative
    rounding-error estimate."""

    value: complex
    terms: int
    err: float

    def __post_init__(self):
        if abs(self.value) > self.terms + self.err + 1e-9:
            raise AssertionError("sum of unit terms exceeds term count")

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "terms": self.terms, "err": self.err}


@dataclass(frozen=True)
class DeltaTerm:
    value: complex
    contributing_cosets: int

    def __post_init__(self):
        assert self.contributing_cosets <= 4


@dataclass(frozen=True)
class BruteForceResult:
    value: KloostermanValue
    stabilized: bool
    height: int
    cosets: int


def _phase_value(num: int, den: int) -> complex:
    """e(num/den) with the fraction reduced mod 1 exactly before rounding."""
    t = (num % den) / den
    return complex(math.cos(TWO_PI * t), math.sin(TWO_PI * t))


def _sum_phases(fracs) -> KloostermanValue:
    re = math.fsum(math.cos(TWO_PI * ((n % d) / d)) for n, d in fracs)
    im = math.fsum(math.sin(TWO_PI * ((n % d) / d)) for n, d in fracs)
    k = len(fracs)
    err = 4e-15 * (1.0 + math.sqrt(k)) + 1e-16 * k
    return KloostermanValue(value=complex(re, im), terms=k, err=err)


def _gcd3(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> GaussianInt:
    if m.is_zero() and n.is_zero():
        return c.canonical()
    return gcd(gcd(m, n), c)


# ---------------------------------------------------------------------------
# classical sum
# ---------------------------------------------------------------------------


def _residue_grid(c: GaussianInt):
    """Int64 component arrays of the canonical residue system mod c."""
    from .gaussint import _hnf_basis

    h, _, g = _hnf_basis(c)
    xs = np.arange(h, dtype=np.int64)
    ys = np.arange(g, dtype=np.int64)
    re, im = np.meshgrid(xs, ys, indexing="ij")
    return re.ravel(), im.ravel()


def _unit_residues_with_inverses(c: GaussianInt):
    """(d_re, d_im, inv_re, inv_im) arrays over the invertible residues mod c."""
    dr, di = _residue_grid(c)
    cr = np.full_like(dr, c.re)
    ci = np.full_like(dr, c.im)
    gr, gi, sr, si = xgcd_i64(dr, di, cr, ci)
    unit = norm_i64(gr, gi) == 1
    dr, di, gr, gi, sr, si = dr[unit], di[unit], gr[unit], gi[unit], sr[unit], si[unit]
    # for the unit g = s*d + t*c, the inverse of d mod c is s * conj(g)
    inv_r = sr * gr + si * gi
    inv_i = si * gr - sr * gi
    return dr, di, inv_r, inv_i


def kloosterman_classical(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> KloostermanValue:
    """S(m, n; c) = sum over invertible d mod c of e(Re((m*d^-1 + n*d)/c))."""
    if c.is_zero():
        raise ValueError("modulus must be nonzero")
    if c.is_unit():
        return KloostermanValue(value=1.0 + 0.0j, terms=1, err=1e-15)
    dr, di, inv_r, inv_i = _unit_residues_with_inverses(c)
    zr = m.re * inv_r - m.im * inv_i + n.re * dr - n.im * di
    zi = m.re * inv_i + m.im * inv_r + n.re * di + n.im * dr
    num = zr * c.re + zi * c.im
    den = c.norm()
    t = (num % den) / den
    re = math.fsum(np.cos(TWO_PI * t))
    im = math.fsum(np.sin(TWO_PI * t))
    k = len(dr)
    err = 4e-15 * (1.0 + math.sqrt(k)) + 1e-16 * k
    return KloostermanValue(value=complex(re, im), terms=k, err=err)


def _phase_block(ws, xr, xi, c: GaussianInt):
    """Rows: frequencies w; cols: residues x; entries e(Re(w*x/c))."""
    den = c.norm()
    out = np.empty((len(ws), len(xr)), dtype=np.complex128)
    for j, w in enumerate(ws):
        zr = w.re * xr - w.im * xi
        zi = w.re * xi + w.im * xr
        num = zr * c.re + zi * c.im
        out[j] = np.exp(2j * np.pi * ((num % den) / den))
    return out


def kloosterman_matrix_classical(ms, ns, c: GaussianInt):
    """S(m, n; c) for all pairs, as a (len(ms), len(ns)) complex array."""
    if c.is_unit():
        return np.ones((len(ms), len(ns)), dtype=np.complex128)
    dr, di, inv_r, inv_i = _unit_residues_with_inverses(c)
    return _phase_block(ms, inv_r, inv_i, c) @ _phase_block(ns, dr, di, c).T


# ---------------------------------------------------------------------------
# same-cusp sum via the restricted residue-pair representation
# ---------------------------------------------------------------------------


def samecusp_moduli_admissible(frame: CuspFrame, c: GaussianInt) -> bool:
    """Membership of c in the same-cusp modulus set: c = gamma*v*w with the
    quadratic congruence u*d^2 + gamma*d - u = 0 soluble mod gcd(w, q0/w)."""
    vw = frame.v * frame.w
    if c.is_zero() or not vw.divides(c):
        return False
    gam = c.exact_div(vw)
    d = gcd(frame.w, frame.q0.exact_div(frame.w))
    if d.is_unit():
        return True
    u = frame.u
    return any(d.divides(u * t * t + gam * t - u) for t in residues(d))


_samecusp_cache: dict[tuple, list] = {}


def _samecusp_pairs(frame: CuspFrame, c: GaussianInt):
    """The (alpha, delta) residue pairs mod c of the same-cusp representation;
    the delta -> alpha correspondence is asserted to be injective."""
    key = (frame.key(), str(c))
    if key in _samecusp_cache:
        return _samecusp_cache[key]
    q0, u, w = frame.q0, frame.u, frame.w
    vw = frame.v * w
    if c.is_zero() or not vw.divides(c):
        raise ValueError(f"{c} is not in the same-cusp modulus lattice {vw}*Z[i]")
    if not samecusp_moduli_admissible(frame, c):
        raise ValueError(f"{c} is not an admissible same-cusp modulus")
    gam = c.exact_div(vw)
    q_over_w = q0.exact_div(w)
    d = gcd(w, q_over_w)
    g_ug = gcd(u, gam)
    u1, gam1 = u.exact_div(g_ug), gam.exact_div(g_ug)
    m1 = (gam * q_over_w).canonical()
    m2 = (gam1 * w).canonical()
    if not lcm(m1, m2).is_associate(c):
        raise AssertionError("congruence moduli do not recover the modulus")
    pairs = []
    seen_alpha: set[str] = set()
    for delta in residues(c):
        if not d.is_unit() and not d.divides(delta * (u * delta + gam) - u):
            continue
        if not m1.is_unit() and gcd(delta, m1) != ONE:
            continue
        if gcd(u * delta + gam, w) != ONE:
            continue
        congruences = []
        if not m1.is_unit():
            congruences.append((mod_inverse(reduce_mod(delta, m1), m1), m1))
        if not m2.is_unit():
            t = reduce_mod(u1 * delta + gam1, m2)
            t_inv = mod_inverse(t, m2)
            u1_inv = mod_inverse(reduce_mod(u1, m2), m2)
            congruences.append((reduce_mod(u1_inv * (gam1 + u1 * u1 * t_inv), m2), m2))
        if not congruences:
            alpha = ZERO
        elif len(congruences) == 1:
            alpha = reduce_mod(congruences[0][0], c)
        else:
            merged = crt_pair(*congruences[0], *congruences[1])
            if merged is None:
                raise AssertionError("incompatible alpha congruences")
            alpha = reduce_mod(merged[0], c)
        akey = str(alpha)
        if akey in seen_alpha:
            raise AssertionError("delta -> alpha correspondence is not injective")
        seen_alpha.add(akey)
        pairs.append((alpha, delta))
    _samecusp_cache[key] = pairs
    return pairs


def _samecusp_twist(frame: CuspFrame, w1: GaussianInt, w2: GaussianInt, scaling: str):
    diff = w2 - w1
    if scaling == "frame":
        # transport from the diagonal scaling matrix to pi*tau_v combines the
        # representation twist 1/(u*v*w) with the matrix change -wt/(u*v):
        # (1 - w*wt)/(u*v*w) = ut/(v*w)
        z = frame.ut * diff
        mod = frame.v * frame.w
    elif scaling == "diagonal":
        z = diff
        mod = frame.u * frame.v * frame.w
    else:
        raise ValueError(f"unknown scaling convention {scaling!r}")
    return (z * mod.conj()).re, mod.norm()


def kloosterman_samecusp(
    frame: CuspFrame,
    w1: GaussianInt,
    w2: GaussianInt,
    c: GaussianInt,
    scaling: str = "frame",
) -> KloostermanValue:
    """Same-cusp generalized Kloosterman sum at Gaussian modulus c in v*w*Z[i].
    scaling="frame" gives the value for the frame's canonical scaling matrix,
    "diagonal" the value for the diagonal one."""
    pairs = _samecusp_pairs(frame, c)
    tw = _phase_value(*_samecusp_twist(frame, w1, w2, scaling))
    den = c.norm()
    fracs = [(((w1 * alpha + w2 * delta) * c.conj()).re, den) for alpha, delta in pairs]
    base = _sum_phases(fracs)
    return KloostermanValue(value=tw * base.value, terms=base.terms, err=base.err + 1e-15)


def kloosterman_matrix_samecusp(frame: CuspFrame, omegas, c: GaussianInt):
    """Same-cusp sums for all frequency pairs, frame scaling, indexed
    [i, j] = S(omegas[i], omegas[j]; c)."""
    pairs = _samecusp_pairs(frame, c)
    n = len(omegas)
    if not pairs:
        return np.zeros((n, n), dtype=np.complex128)
    ar = np.array([p[0].re for p in pairs], dtype=np.int64)
    ai = np.array([p[0].im for p in pairs], dtype=np.int64)
    dr = np.array([p[1].re for p in pairs], dtype=np.int64)
    di = np.array([p[1].im for p in pairs], dtype=np.int64)
    S = _phase_block(omegas, ar, ai, c) @ _phase_block(omegas, dr, di, c).T
    vw = frame.v * frame.w
    nvw = vw.norm()
    twists = np.array(
        [_phase_value(((frame.ut * wb) * vw.conj()).re, nvw) for wb in omegas]
    )
    # twist factor e(Re(ut*(w2-w1)/(v*w))) factors through the pair
    S *= twists[None, :] / twists[:, None]
    return S


# ---------------------------------------------------------------------------
# general two-cusp sum
# ---------------------------------------------------------------------------


def _pair_phase(m, A, m1, den1, n, D, m2, den2):
    n1 = ((m * A) * m1.conj()).re
    n2 = ((n * D) * m2.conj()).re
    fr = Fraction(n1, den1) + Fraction(n2, den2)
    return fr.numerator, fr.denominator


def kloosterman_general(
    f1: CuspFrame,
    f2: CuspFrame,
    m: GaussianInt,
    n: GaussianInt,
    C: GaussianInt,
    check_periodicity: bool = False,
) -> KloostermanValue:
    """Generalized Kloosterman sum at reduced modulus C (the geometric modulus
    is C*sqrt(v1*v2)): the residue double sum over A mod v1*C, D mod v2*C with
    A*D = 1 mod C, filtered by the exact membership indicator."""
    if C.is_zero():
        raise ValueError("reduced modulus must be nonzero")
    if f1.q0 != f2.q0:
        raise ValueError("frames have different levels")
    m1, m2 = f1.v * C, f2.v * C
    den1, den2 = m1.norm(), m2.norm()
    fracs = []
    first_pair = None
    for A, D in _admissible_pairs(f1, f2, C):
        if first_pair is None:
            first_pair = (A, D)
        fracs.append(_pair_phase(m, A, m1, den1, n, D, m2, den2))
    if check_periodicity and first_pair is not None:
        A, D = first_pair
        for s, t in [(ONE, ZERO), (ZERO, ONE), (G(1, 1), G(-2, 3))]:
            if not chi_indicator(f1, f2, A + s * m1, D + t * m2, C):
                raise AssertionError("residue-pair periodicity violated")
    return _sum_phases(fracs)


def kloosterman_factor(
    f1: CuspFrame,
    f2: CuspFrame,
    m: GaussianInt,
    n: GaussianInt,
    C: GaussianInt,
) -> tuple[KloostermanValue, KloostermanValue]:
    """Split the general sum at reduced modulus C into the sum at the level
    part of C, taken over inverse-shifted cusps, times a simple Kloostermarn
    sum at the level-coprime part."""
    if C.is_zero():
        raise ValueError("reduced modulus must be nonzero")
    q0 = f1.q0
    if f2.q0 != q0:
        raise ValueError("frames have different levels")
    c_part, c_cop = q0_part(C, q0)  # C = c_part * c_cop, c_cop coprime to q0
    el = lcm(lcm(f1.v, f2.v) * c_part, q0)
    c_tilde = ONE if el.is_unit() else mod_inverse(reduce_mod(c_cop, el), el)
    f1s = build_frame(c_tilde * f1.u, f1.w, q0)
    f2s = build_frame(c_tilde * f2.u, f2.w, q0)
    general_part = kloosterman_general(f1s, f2s, c_tilde * m, c_tilde * n, c_part)
    if c_cop.is_unit():
        simple_part = KloostermanValue(value=1.0 + 0.0j, terms=1, err=1e-15)
    else:
        inv1 = mod_inverse(reduce_mod(c_part * f1.v, c_cop), c_cop)
        inv2 = mod_inverse(reduce_mod(c_part * f2.v, c_cop), c_cop)
        simple_part = kloosterman_classical(inv1 * m, inv2 * n, c_cop)
    return general_part, simple_part


# ---------------------------------------------------------------------------
# height-bounded group enumeration (the oracle)
# ---------------------------------------------------------------------------


def _disk_points(max_norm: int) -> list[GaussianInt]:
    b = math.isqrt(max_norm) + 1
    pts = [
        G(x, y)
        for x in range(-b, b + 1)
        for y in range(-b, b + 1)
        if x * x + y * y <= max_norm
    ]
    pts.sort(key=GaussianInt.sort_key)
    return pts


def _cmul(ar, ai, br, bi):
    return ar * br - ai * bi, ar * bi + ai * br


def _nearest_div(zr, zi, wr, wi, wnorm):
    """Nearest Gaussian quotient of z/w for int64 arrays (w nonzero)."""
    pr = zr * wr + zi * wi
    pi_ = zi * wr - zr * wi
    qr = np.floor_divide(2 * pr + wnorm, 2 * wnorm)
    qi = np.floor_divide(2 * pi_ + wnorm, 2 * wnorm)
    return qr, qi


_T_OFFSETS = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]


def _unimodular_families(f1: CuspFrame, f2: CuspFrame, H: int, chunk_elems: int = 2_000_000):
    """Vector batches of unimodular families gamma(t) = [[a0 + t*c, b0 + t*d],
    [c, d]] covering every group element with lower row of norm <= H^2:
    yields (cr, ci, dr, di, a0r, a0i, b0r, b0i) int64 arrays."""
    q0 = f1.q0
    ds = _disk_points(H * H)
    ds_r = np.array([z.re for z in ds], dtype=np.int64)
    ds_i = np.array([z.im for z in ds], dtype=np.int64)
    lows = [z for z in ds if not z.is_zero() and q0.divides(z)]
    group = max(1, chunk_elems // max(1, len(ds)))
    for start in range(0, len(lows), group):
        batch = lows[start : start + group]
        cr = np.repeat(np.array([z.re for z in batch], dtype=np.int64), len(ds))
        ci = np.repeat(np.array([z.im for z in batch], dtype=np.int64), len(ds))
        dr = np.tile(ds_r, len(batch))
        di = np.tile(ds_i, len(batch))
        gr, gi, sr, si = xgcd_i64(dr, di, cr, ci)
        unit = norm_i64(gr, gi) == 1
        if not unit.any():
            continue
        dr, di, cr, ci = dr[unit], di[unit], cr[unit], ci[unit]
        gr, gi, sr, si = gr[unit], gi[unit], sr[unit], si[unit]
        a0r = sr * gr + si * gi  # s * conj(g): a0*d = 1 mod c
        a0i = si * gr - sr * gi
        pr = a0r * dr - a0i * di - 1
        pi_ = a0r * di + a0i * dr
        cn = norm_i64(cr, ci)
        b0r = (pr * cr + pi_ * ci) // cn
        b0i = (pi_ * cr - pr * ci) // cn
        yield cr, ci, dr, di, a0r, a0i, b0r, b0i
    # upper-triangular rows: c = 0, d a unit, a = 1/d, b = t*d
    for eps in UNITS:
        eps_inv = next(x for x in UNITS if eps * x == ONE)
        one = np.ones(1, dtype=np.int64)
        yield (
            np.zeros(1, dtype=np.int64),
            np.zeros(1, dtype=np.int64),
            one * eps_inv.re,
            one * eps_inv.im,
            one * eps.re,
            one * eps.im,
            np.zeros(1, dtype=np.int64),
            np.zeros(1, dtype=np.int64),
        )


class _CellGeometry:
    """Linear forms tying a group element to its Bruhat data for a frame pair:
    the reduced cell C and the diagonal residues A, D."""

    def __init__(self, f1: CuspFrame, f2: CuspFrame):
        self.f1, self.f2 = f1, f2
        self.u1, self.w1, self.ut1, self.wt1 = f1.u, f1.w, f1.ut, f1.wt
        self.u2, self.w2, self.ut2, self.wt2 = f2.u, f2.w, f2.ut, f2.wt

    def k_l0_c0_w(self, cr, ci, dr, di, a0r, a0i, b0r, b0i):
        u1, w1, u2, w2 = self.u1, self.w1, self.u2, self.w2
        Kr, Ki = _cmul(np.full_like(cr, u2.re), np.full_like(cr, u2.im), cr, ci)
        t1r, t1i = _cmul(np.full_like(dr, w2.re), np.full_like(dr, w2.im), dr, di)
        Kr, Ki = Kr + t1r, Ki + t1i
        L0r, L0i = _cmul(np.full_like(a0r, u2.re), np.full_like(a0r, u2.im), a0r, a0i)
        t2r, t2i = _cmul(np.full_like(b0r, w2.re), np.full_like(b0r, w2.im), b0r, b0i)
        L0r, L0i = L0r + t2r, L0i + t2i
        wl0r, wl0i = _cmul(np.full_like(L0r, w1.re), np.full_like(L0r, w1.im), L0r, L0i)
        u1kr, u1ki = _cmul(np.full_like(Kr, u1.re), np.full_like(Kr, u1.im), Kr, Ki)
        C0r, C0i = u1kr - wl0r, u1ki - wl0i
        Wr, Wi = _cmul(np.full_like(Kr, w1.re), np.full_like(Kr, w1.im), Kr, Ki)
        return Kr, Ki, L0r, L0i, C0r, C0i, Wr, Wi

    def bruhat_entries(self, ar, ai, br, bi, cr, ci, dr, di):
        """(A, B, D) components of pi1^-1 gamma pi2 for entry arrays."""
        u1, w1, ut1, wt1 = self.u1, self.w1, self.ut1, self.wt1
        u2, w2, ut2, wt2 = self.u2, self.w2, self.ut2, self.wt2
        Lr, Li = _cmul(np.full_like(ar, u2.re), np.full_like(ar, u2.im), ar, ai)
        t, s = _cmul(np.full_like(br, w2.re), np.full_like(br, w2.im), br, bi)
        Lr, Li = Lr + t, Li + s
        Kr, Ki = _cmul(np.full_like(cr, u2.re), np.full_like(cr, u2.im), cr, ci)
        t, s = _cmul(np.full_like(dr, w2.re), np.full_like(dr, w2.im), dr, di)
        Kr, Ki = Kr + t, Ki + s
        # second-column analogues with pi2's second column (-wt2, ut2)
        Mr, Mi = _cmul(np.full_like(ar, -wt2.re), np.full_like(ar, -wt2.im), ar, ai)
        t, s = _cmul(np.full_like(br, ut2.re), np.full_like(br, ut2.im), br, bi)
        Mr, Mi = Mr + t, Mi + s
        Nr, Ni = _cmul(np.full_like(cr, -wt2.re), np.full_like(cr, -wt2.im), cr, ci)
        t, s = _cmul(np.full_like(dr, ut2.re), np.full_like(dr, ut2.im), dr, di)
        Nr, Ni = Nr + t, Ni + s
        # rows of pi1^{-1} = [[ut1, wt1], [-w1, u1]]
        Ar, Ai = _cmul(np.full_like(Lr, ut1.re), np.full_like(Lr, ut1.im), Lr, Li)
        t, s = _cmul(np.full_like(Kr, wt1.re), np.full_like(Kr, wt1.im), Kr, Ki)
        Ar, Ai = Ar + t, Ai + s
        Br, Bi = _cmul(np.full_like(Mr, ut1.re), np.full_like(Mr, ut1.im), Mr, Mi)
        t, s = _cmul(np.full_like(Nr, wt1.re), np.full_like(Nr, wt1.im), Nr, Ni)
        Br, Bi = Br + t, Bi + s
        Dr, Di = _cmul(np.full_like(Nr, u1.re), np.full_like(Nr, u1.im), Nr, Ni)
        t, s = _cmul(np.full_like(Mr, -w1.re), np.full_like(Mr, -w1.im), Mr, Mi)
        Dr, Di = Dr + t, Di + s
        return Ar, Ai, Br, Bi, Dr, Di


_census_cache: dict[tuple, dict] = {}
_zero_census_cache: dict[tuple, frozenset] = {}


def _coset_census(f1: CuspFrame, f2: CuspFrame, cmax_norm: int, H: int) -> dict:
    """Double cosets realized by group elements with all entry norms <= H^2,
    bucketed by the reduced nonzero cell C with norm(C) <= cmax_norm:
    {(C.re, C.im): frozenset((A.re, A.im, D.re, D.im))}."""
    key = (f1.key(), f2.key(), cmax_norm, H)
    if key in _census_cache:
        return _census_cache[key]
    geom = _CellGeometry(f1, f2)
    v1, v2 = f1.v, f2.v
    h2 = H * H
    cells: dict[tuple, set] = {}

    def finish(cr, ci, dr, di, ar, ai, br, bi, Ctr, Cti):
        keep = (norm_i64(ar, ai) <= h2) & (norm_i64(br, bi) <= h2)
        if not keep.any():
            return
        cr, ci, dr, di = cr[keep], ci[keep], dr[keep], di[keep]
        ar, ai, br, bi = ar[keep], ai[keep], br[keep], bi[keep]
        Ctr, Cti = Ctr[keep], Cti[keep]
        Ar, Ai, _, _, Dr, Di = geom.bruhat_entries(ar, ai, br, bi, cr, ci, dr, di)
        m1r, m1i = v1.re * Ctr - v1.im * Cti, v1.re * Cti + v1.im * Ctr
        m2r, m2i = v2.re * Ctr - v2.im * Cti, v2.re * Cti + v2.im * Ctr
        Ared_r, Ared_i = reduce_floor_i64(Ar, Ai, m1r, m1i)
        Dred_r, Dred_i = reduce_floor_i64(Dr, Di, m2r, m2i)
        for idx in range(len(Ctr)):
            ckey = (int(Ctr[idx]), int(Cti[idx]))
            cells.setdefault(ckey, set()).add(
                (int(Ared_r[idx]), int(Ared_i[idx]), int(Dred_r[idx]), int(Dred_i[idx]))
            )

    for cru, ciu, dr, di, a0r, a0i, b0r, b0i in _unimodular_families(f1, f2, H):
        Kr, Ki, _, _, C0r, C0i, Wr, Wi = geom.k_l0_c0_w(cru, ciu, dr, di, a0r, a0i, b0r, b0i)
        wnorm = norm_i64(Wr, Wi)
        big = wnorm > 4 * cmax_norm
        if big.any():
            tr0, ti0 = _nearest_div(C0r[big], C0i[big], Wr[big], Wi[big], wnorm[big])
            for ox, oy in _T_OFFSETS:
                tr, ti = tr0 + ox, ti0 + oy
                wtr, wti = _cmul(Wr[big], Wi[big], tr, ti)
                Ctr, Cti = C0r[big] - wtr, C0i[big] - wti
                keep = (norm_i64(Ctr, Cti) <= cmax_norm) & ((Ctr != 0) | (Cti != 0))
                if not keep.any():
                    continue
                atr, ati = _cmul(tr[keep], ti[keep], cru[big][keep], ciu[big][keep])
                btr, bti = _cmul(tr[keep], ti[keep], dr[big][keep], di[big][keep])
                finish(
                    cru[big][keep], ciu[big][keep], dr[big][keep], di[big][keep],
                    a0r[big][keep] + atr, a0i[big][keep] + ati,
                    b0r[big][keep] + btr, b0i[big][keep] + bti,
                    Ctr[keep], Cti[keep],
                )
        small = (~big) & (wnorm > 0)
        if small.any():
            # one offset disk wide enough for every small-|W| family
            offsets = _disk_points(cmax_norm + 4)
            tr0, ti0 = _nearest_div(C0r[small], C0i[small], Wr[small], Wi[small], wnorm[small])
            for off in offsets:
                tr, ti = tr0 + off.re, ti0 + off.im
                wtr, wti = _cmul(Wr[small], Wi[small], tr, ti)
                Ctr, Cti = C0r[small] - wtr, C0i[small] - wti
                keep = (norm_i64(Ctr, Cti) <= cmax_norm) & ((Ctr != 0) | (Cti != 0))
                if not keep.any():
                    continue
                atr, ati = _cmul(tr[keep], ti[keep], cru[small][keep], ciu[small][keep])
                btr, bti = _cmul(tr[keep], ti[keep], dr[small][keep], di[small][keep])
                finish(
                    cru[small][keep], ciu[small][keep], dr[small][keep], di[small][keep],
                    a0r[small][keep] + atr, a0i[small][keep] + ati,
                    b0r[small][keep] + btr, b0i[small][keep] + bti,
                    Ctr[keep], Cti[keep],
                )
        degenerate = wnorm == 0
        if degenerate.any():
            # K = 0 forces (c, d) = s*(-w2, u2) with s a unit; the cell is
            # C0 = -w1 * (a unit), independent of t, and every height-allowed
            # t contributes its own group element
            idxs = np.nonzero(degenerate)[0]
            for idx in idxs:
                C0 = G(int(C0r[idx]), int(C0i[idx]))
                if C0.is_zero() or C0.norm() > cmax_norm:
                    continue
                cz = G(int(cru[idx]), int(ciu[idx]))
                dz = G(int(dr[idx]), int(di[idx]))
                a0 = G(int(a0r[idx]), int(a0i[idx]))
                b0 = G(int(b0r[idx]), int(b0i[idx]))
                qq, _ = _nearest_scalar(-a0, cz) if not cz.is_zero() else (ZERO, ZERO)
                rad = 4 * h2 // max(1, cz.norm()) + 4 if not cz.is_zero() else h2
                t_list = [qq + off for off in _disk_points(rad)]
                k = len(t_list)
                tr = np.array([t.re for t in t_list], dtype=np.int64)
                ti = np.array([t.im for t in t_list], dtype=np.int64)
                crr = np.full(k, cz.re, dtype=np.int64)
                cii = np.full(k, cz.im, dtype=np.int64)
                drr = np.full(k, dz.re, dtype=np.int64)
                dii = np.full(k, dz.im, dtype=np.int64)
                atr, ati = _cmul(tr, ti, crr, cii)
                btr, bti = _cmul(tr, ti, drr, dii)
                finish(
                    crr, cii, drr, dii,
                    a0.re + atr, a0.im + ati, b0.re + btr, b0.im + bti,
                    np.full(k, C0.re, dtype=np.int64), np.full(k, C0.im, dtype=np.int64),
                )

    out = {k: frozenset(v) for k, v in cells.items()}
    _census_cache[key] = out
    return out


def _nearest_scalar(z: GaussianInt, w: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    from .gaussint import divmod_nearest

    return divmod_nearest(z, w)


def _zero_cell_census(f1: CuspFrame, f2: CuspFrame, H: int) -> frozenset:
    """Left cosets of upper-triangular Bruhat elements realized by group
    elements with entry norms <= H^2: frozenset((A.re, A.im, B.re, B.im)) with
    B reduced mod v1."""
    key = (f1.key(), f2.key(), H)
    if key in _zero_census_cache:
        return _zero_census_cache[key]
    geom = _CellGeometry(f1, f2)
    v1 = f1.v
    h2 = H * H
    found: set[tuple] = set()
    for cru, ciu, dr, di, a0r, a0i, b0r, b0i in _unimodular_families(f1, f2, H):
        Kr, Ki, _, _, C0r, C0i, Wr, Wi = geom.k_l0_c0_w(cru, ciu, dr, di, a0r, a0i, b0r, b0i)
        wnorm = norm_i64(Wr, Wi)
        nz = wnorm > 0
        if not nz.any():
            continue
        # exact solution of C0 - W*t = 0
        pr = C0r[nz] * Wr[nz] + C0i[nz] * Wi[nz]
        pi_ = C0i[nz] * Wr[nz] - C0r[nz] * Wi[nz]
        ok = (pr % wnorm[nz] == 0) & (pi_ % wnorm[nz] == 0)
        if not ok.any():
            continue
        tr = (pr // wnorm[nz])[ok]
        ti = (pi_ // wnorm[nz])[ok]
        crn, cin = cru[nz][ok], ciu[nz][ok]
        drn, din = dr[nz][ok], di[nz][ok]
        atr, ati = _cmul(tr, ti, crn, cin)
        btr, bti = _cmul(tr, ti, drn, din)
        ar, ai = a0r[nz][ok] + atr, a0i[nz][ok] + ati
        br, bi = b0r[nz][ok] + btr, b0i[nz][ok] + bti
        keep = (norm_i64(ar, ai) <= h2) & (norm_i64(br, bi) <= h2)
        if not keep.any():
            continue
        ar, ai, br, bi = ar[keep], ai[keep], br[keep], bi[keep]
        crn, cin, drn, din = crn[keep], cin[keep], drn[keep], din[keep]
        Ar, Ai, Br, Bi, _, _ = geom.bruhat_entries(ar, ai, br, bi, crn, cin, drn, din)
        v1r = np.full_like(Br, v1.re)
        v1i = np.full_like(Br, v1.im)
        Bred_r, Bred_i = reduce_floor_i64(Br, Bi, v1r, v1i)
        for idx in range(len(Ar)):
            found.add((int(Ar[idx]), int(Ai[idx]), int(Bred_r[idx]), int(Bred_i[idx])))
    out = frozenset(found)
    _zero_census_cache[key] = out
    return out


def _census_value(cell, f1: CuspFrame, f2: CuspFrame, m, n, C) -> KloostermanValue:
    m1, m2 = f1.v * C, f2.v * C
    den1, den2 = m1.norm(), m2.norm()
    fracs = []
    for (ar, ai, dr, di) in sorted(cell):
        fracs.append(_pair_phase(m, G(ar, ai), m1, den1, n, G(dr, di), m2, den2))
    return _sum_phases(fracs)


def kloosterman_bruteforce(
    f1: CuspFrame,
    f2: CuspFrame,
    m: GaussianInt,
    n: GaussianInt,
    C: GaussianInt,
    heights: tuple[int, ...] = DEFAULT_HEIGHTS,
    cmax_norm: int | None = None,
) -> BruteForceResult:
    """Double-coset oracle: enumerate group elements of bounded height, bucket
    by cell, canonicalize, dedupe, sum.  Stabilized when the coset set for
    this cell is unchanged from one height to the next; a non-stabilized
    result is reported as such, never silently."""
    if C.is_zero():
        raise ValueError("reduced modulus must be nonzero")
    cmax = cmax_norm if cmax_norm is not None else C.norm()
    if C.norm() > cmax:
        raise ValueError("cell norm exceeds census bound")
    ckey = (C.re, C.im)
    prev = None
    for H in heights:
        census = _coset_census(f1, f2, cmax, H)
        cell = census.get(ckey, frozenset())
        if prev is not None and cell == prev:
            return BruteForceResult(
                value=_census_value(cell, f1, f2, m, n, C),
                stabilized=True,
                height=H,
                cosets=len(cell),
            )
        prev = cell
    cell = prev if prev is not None else frozenset()
    return BruteForceResult(
        value=_census_value(cell, f1, f2, m, n, C),
        stabilized=False,
        height=heights[-1],
        cosets=len(cell),
    )


# ---------------------------------------------------------------------------
# delta term
# ---------------------------------------------------------------------------


def _delta_from_cosets(cosets, v: GaussianInt, w1: GaussianInt, w2: GaussianInt) -> DeltaTerm:
    """Sum e(Re((B/v) * A * w1)) over (A, B) cosets supported on A^2 w1 = w2.
    The phase is well defined on B mod v because Re of a Gaussian integer is
    an integer."""
    total = 0j
    contributing = 0
    nv = v.norm()
    for A, B in cosets:
        if A * A * w1 != w2:
            continue
        num = ((B * A * w1) * v.conj()).re
        total += _phase_value(num, nv)
        contributing += 1
    return DeltaTerm(value=total, contributing_cosets=contributing)


def delta_term(f1: CuspFrame, f2: CuspFrame, w1: GaussianInt, w2: GaussianInt) -> DeltaTerm:
    """The diagonal symbol: zero unless the cusps are equivalent, else the sum
    over the 2 or 4 upper-triangular cosets built from the stabilizer
    structure and an exact equivalence witness."""
    if f1.q0 != f2.q0:
        raise ValueError("frames have different levels")
    q0 = f1.q0
    gamma0 = equivalence_witness(f2.cusp(), f1.cusp(), q0)
    if gamma0 is None:
        return DeltaTerm(value=0j, contributing_cosets=0)
    assert f1.v == f2.v  # equivalent cusps share the canonical width generator
    m0 = f1.pi().inv() * gamma0 * f2.pi()
    assert m0.c.is_zero(), "witness does not land in the zero cell"
    inners = [GMat(ONE, ZERO, ZERO, ONE), GMat(-ONE, ZERO, ZERO, -ONE)]
    if f1.stab_index == 4:
        z0 = f1.beta_num
        inners.append(GMat(I, z0, ZERO, -I))
        inners.append(GMat(-I, -z0, ZERO, I))
    cosets = []
    for inner in inners:
        mm = inner * m0
        assert mm.c.is_zero() and mm.a * mm.d == ONE
        cosets.append((mm.a, mm.b))
    return _delta_from_cosets(cosets, f1.v, w1, w2)


def delta_bruteforce(
    f1: CuspFrame,
    f2: CuspFrame,
    w1: GaussianInt,
    w2: GaussianInt,
    heights: tuple[int, ...] = DEFAULT_HEIGHTS,
) -> tuple[DeltaTerm, bool]:
    """Independent evaluation of the diagonal symbol by height-bounded group
    enumeration of the zero cell."""
    prev = None
    for H in heights:
        cur = _zero_cell_census(f1, f2, H)
        if prev is not None and cur == prev:
            cosets = [(G(a, b), G(c, d)) for a, b, c, d in sorted(cur)]
            return _delta_from_cosets(cosets, f1.v, w1, w2), True
        prev = cur
    cosets = [(G(a, b), G(c, d)) for a, b, c, d in sorted(prev or frozenset())]
    return _delta_from_cosets(cosets, f1.v, w1, w2), False


def samecusp_block(
    frame: CuspFrame,
    c: GaussianInt,
    d: GaussianInt,
    w1: GaussianInt,
    w2: GaussianInt,
) -> complex:
    """The divisor block K(w1, w2; d) of the same-cusp sum at modulus c: the
    (alpha, delta) double sum mod d with the two congruence conditions taken
    mod gcd(gamma*q0/w, d) and gcd(gamma1*w, d).  For d = c its absolute value
    equals |S|; across a coprime factorization of c the blocks multiply."""
    q0, u, w = frame.q0, frame.u, frame.w
    vw = frame.v * w
    gam = c.exact_div(vw)
    g_ug = gcd(u, gam)
    u1, gam1 = u.exact_div(g_ug), gam.exact_div(g_ug)
    m1 = gcd((gam * q0.exact_div(w)).canonical(), d)
    m2 = gcd((gam1 * w).canonical(), d)
    den = d.norm()
    total = 0j
    for delta in residues(d):
        if not m1.is_unit():
            if gcd(delta, m1) != ONE:
                continue
            alpha0 = mod_inverse(reduce_mod(delta, m1), m1)
        else:
            alpha0 = ZERO
        for alpha in residues(d):
            if not m1.is_unit() and not m1.divides(alpha - alpha0):
                continue
            if not m2.is_unit():
                lhs = (u1 * alpha - gam1) * (u1 * delta + gam1) - u1 * u1
                if not m2.divides(lhs):
                    continue
            num = ((w1 * alpha + w2 * delta) * d.conj()).re
            total += _phase_value(num, den)
    return total


# ---------------------------------------------------------------------------
# Gauss sums and bound checks
# ---------------------------------------------------------------------------


def gauss_sum_quadratic(a: GaussianInt, prime: GaussianInt) -> complex:
    """sum over beta mod prime of e(Re(a*beta^2/prime))."""
    den = prime.norm()
    re_parts, im_parts = [], []
    for beta in residues(prime):
        num = ((a * beta * beta) * prime.conj()).re
        t = (num % den) / den
        re_parts.append(math.cos(TWO_PI * t))
        im_parts.append(math.sin(TWO_PI * t))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def check_bounds(kind: str, params: dict) -> SweepReport:
    """One bound-check row; violations are data (ratio > 1), not exceptions."""
    report = SweepReport(title=kind)
    if kind == "trivial":
        m, n, c = params["m"], params["n"], params["c"]
        val = kloosterman_classical(m, n, c)
        report.add({"c": str(c)}, abs(val.value), trivial=float(multiplicative_stats(c).phi))
    elif kind == "weil_estermann_prime":
        m, n, prime, e = params["m"], params["n"], params["prime"], params["e"]
        mod = prime**e
        val = kloosterman_classical(m, n, mod)
        tau_p, ups_p = (8 * math.sqrt(2), 2) if prime.divides(G(2)) else (2.0, 0)
        env = tau_p * abs(complex(prime)) ** ups_p * abs(complex(_gcd3(m, n, mod) * mod))
        report.add({"prime": str(prime), "e": e}, abs(val.value), weil_estermann=env)
    elif kind == "weil_estermann":
        m, n, c = params["m"], params["n"], params["c"]
        val = kloosterman_classical(m, n, c)
        env = 2.0**3.5 * 2.0 ** multiplicative_stats(c).omega * abs(complex(_gcd3(m, n, c) * c))
        report.add({"c": str(c)}, abs(val.value), weil_estermann=env)
    elif kind == "general_trivial":
        f1, f2, m, n, C = (params[k] for k in ("f1", "f2", "m", "n", "C"))
        val = kloosterman_general(f1, f2, m, n, C)
        env = float((C * f1.v * f2.v).norm())
        report.add({"C": str(C)}, abs(val.value), general_trivial=env)
    elif kind == "general_we":
        f1, f2, m, n, C = (params[k] for k in ("f1", "f2", "m", "n", "C"))
        val = kloosterman_general(f1, f2, m, n, C)
        c_part, _ = q0_part(C, f1.q0)
        stats = multiplicative_stats(C)
        base = abs(complex(_gcd3(m, n, C) * C * c_part)) * float(f1.v.norm() * f2.v.norm())
        report.add(
            {"C": str(C)},
            abs(val.value),
            tau_ideal=2.0**1.5 * stats.tau_ideal * base,
            tau_assoc=2.0**1.5 * stats.tau_assoc * base,
        )
    else:
        raise ValueError(f"unknown bound kind {kind!r}")
    return report
