"""Kloosterman-sum tests: classical examples by residue enumeration, the
same-cusp representation against the general route and the height-bounded
double-coset oracle, the factorization identity, divisor-block
multiplicativity, scaling covariance, symmetries, bounds, and delta terms."""

from __future__ import annotations

import math

import numpy as np
import pytest

from zisieve.cusps import CuspFrame, class_representatives
from zisieve.gaussint import (
    GaussianInt,
    I,
    ONE,
    UNITS,
    ZERO,
    factorize,
    gcd,
    mod_inverse,
    multiplicative_stats,
    reduce_mod,
    residues,
)
from zisieve.kloosterman import (
    check_bounds,
    delta_bruteforce,
    delta_term,
    gauss_sum_quadratic,
    kloosterman_bruteforce,
    kloosterman_classical,
    kloosterman_factor,
    kloosterman_general,
    kloosterman_matrix_classical,
    kloosterman_matrix_samecusp,
    kloosterman_samecusp,
    samecusp_block,
    samecusp_moduli_admissible,
)

G = GaussianInt
TOL = 1e-9


def frames_at(q0):
    return class_representatives(q0)


def samecusp_moduli(frame, max_norm):
    vw = frame.v * frame.w
    out = []
    b = math.isqrt(max_norm // vw.norm()) + 1
    for x in range(-b, b + 1):
        for y in range(-b, b + 1):
            gam = G(x, y)
            c = gam * vw
            if gam.is_zero() or c.norm() > max_norm:
                continue
            if samecusp_moduli_admissible(frame, c):
                out.append(c)
    out.sort(key=G.sort_key)
    return out


class TestClassical:
    def test_examples(self):
        v = kloosterman_classical(ONE, ONE, G(1, 1))
        assert abs(v.value - 1.0) < TOL  # single residue, e(Re(2/(1+i))) = e(1)
        assert v.terms == 1

        for c in [G(2), G(3), G(2, 1), G(1, 1)]:
            v = kloosterman_classical(ZERO, ZERO, c)
            assert abs(v.value - multiplicative_stats(c).phi) < TOL

        v = kloosterman_classical(ZERO, ONE, G(1, 1))
        assert abs(v.value - (-1.0)) < TOL  # e(Re((1-i)/2)) = e(1/2)

    def test_unit_modulus(self):
        v = kloosterman_classical(G(3, 2), G(-1, 5), I)
        assert abs(v.value - 1.0) < TOL and v.terms == 1

    def test_symmetric_in_m_n(self):
        for c in [G(3), G(2, 1), G(4, 2)]:
            for m, n in [(ONE, G(2)), (G(1, 1), G(0, 3)), (G(2, -1), ONE)]:
                a = kloosterman_classical(m, n, c).value
                b = kloosterman_classical(n, m, c).value
                assert abs(a - b) < TOL

    def test_conjugation_symmetry(self):
        for c in [G(3), G(2, 1)]:
            for m, n in [(ONE, G(1, 1)), (G(2), G(0, 1))]:
                a = kloosterman_classical(m, n, c).value
                b = kloosterman_classical(-m, -n, c).value
                assert abs(a.conjugate() - b) < TOL

    def test_real_for_real_modulus_ramanujan(self):
        for c in [G(3), G(5), G(7)]:
            for n in [ONE, G(2, 1), G(0, 3)]:
                v = kloosterman_classical(ZERO, n, c).value
                assert abs(v.imag) < TOL

    def test_matrix_matches_scalar(self):
        c = G(3, 1)
        ms = [ZERO, ONE, G(1, 1), G(-2, 1)]
        ns = [ONE, G(2), G(0, -1)]
        mat = kloosterman_matrix_classical(ms, ns, c)
        for i, m in enumerate(ms):
            for j, n in enumerate(ns):
                assert abs(mat[i, j] - kloosterman_classical(m, n, c).value) < TOL

    def test_associate_modulus_relation(self):
        # reindexing d -> eps*d gives S(m, n; eps*c) = S(conj(eps)^2 * m, n; c),
        # so sweeping all (m, n) residues at a canonical modulus covers the
        # associates' sums bijectively
        c = G(3, 1)
        for eps in UNITS:
            a = kloosterman_classical(ONE, G(2), c * eps).value
            b = kloosterman_classical(eps.conj() * eps.conj() * ONE, G(2), c).value
            assert abs(a - b) < TOL


class TestSameCusp:
    def test_level_one_equals_classical(self):
        fr = frames_at(ONE)[0]
        for c in samecusp_moduli(fr, 12):
            for m, n in [(ONE, ONE), (ONE, G(1, 1)), (G(2), G(0, 1))]:
                a = kloosterman_samecusp(fr, m, n, c).value
                b = kloosterman_classical(m, n, c).value
                assert abs(a - b) < TOL, (str(c), str(m), str(n))

    def test_zero_frequencies_count(self):
        for q0 in [ONE, G(1, 1), G(2), G(3)]:
            for fr in frames_at(q0):
                for c in samecusp_moduli(fr, 20)[:4]:
                    v = kloosterman_samecusp(fr, ZERO, ZERO, c)
                    assert abs(v.value.imag) < TOL
                    assert v.value.real >= -TOL
                    assert abs(v.value.real - round(v.value.real)) < TOL

    def test_inadmissible_modulus_raises(self):
        fr = frames_at(G(2))[0]
        with pytest.raises(ValueError):
            kloosterman_samecusp(fr, ONE, ONE, ONE + fr.v * fr.w)

    def test_agrees_with_general_route(self):
        for q0 in [ONE, G(1, 1), G(2)]:
            for fr in frames_at(q0):
                for c in samecusp_moduli(fr, 18):
                    C = c.exact_div(fr.v)
                    for m, n in [(ONE, ONE), (ONE, G(1, 1))]:
                        a = kloosterman_samecusp(fr, m, n, c).value
                        b = kloosterman_general(fr, fr, m, n, C).value
                        assert abs(a - b) < TOL, (str(q0), str(fr.cusp()), str(c))

    def test_matrix_matches_scalar(self):
        fr = frames_at(G(1, 1))[0]
        c = samecusp_moduli(fr, 20)[1]
        omegas = [ONE, G(1, 1), G(2), G(0, 1)]
        mat = kloosterman_matrix_samecusp(fr, omegas, c)
        for i, m in enumerate(omegas):
            for j, n in enumerate(omegas):
                assert abs(mat[i, j] - kloosterman_samecusp(fr, m, n, c).value) < TOL

    def test_scaling_conventions_differ_by_translation_twist(self):
        # the diagonal scaling matrix is the canonical one times n[wt/(u*v)]
        for q0 in [G(2), G(3), G(2, 1)]:
            for fr in frames_at(q0):
                mods = samecusp_moduli(fr, 30)
                if not mods:
                    continue
                c = mods[0]
                for m, n in [(ONE, G(1, 1)), (G(2), ONE)]:
                    a = kloosterman_samecusp(fr, m, n, c, scaling="frame").value
                    b = kloosterman_samecusp(fr, m, n, c, scaling="diagonal").value
                    beta = complex(fr.wt) / complex(fr.u * fr.v)
                    diff = complex(n - m)
                    predicted = np.exp(-2j * np.pi * (beta * diff).real)
                    assert abs(a - predicted * b) < TOL


class TestGeneral:
    def test_empty_cell_is_zero(self):
        # at level 2, the same-cusp cell at reduced modulus 1 is empty for the
        # infinity-class frame (moduli live in q0*v*Z[i])
        fr = next(f for f in frames_at(G(2)) if f.w == G(2))
        v = kloosterman_general(fr, fr, ONE, ONE, ONE)
        assert v.terms == 0 and v.value == 0

    def test_inversion_symmetry(self):
        # S_{a,b}(m, n; C) = S_{b,a}(-n, -m; C)
        for q0 in [G(1, 1), G(2)]:
            frames = frames_at(q0)
            for f1 in frames:
                for f2 in frames:
                    for C in [ONE, G(1, 1), G(2), G(2, 1)]:
                        a = kloosterman_general(f1, f2, ONE, G(1, 1), C).value
                        b = kloosterman_general(f2, f1, -G(1, 1), -ONE, C).value
                        assert abs(a - b) < TOL

    def test_periodicity_assertion_runs(self):
        fr = frames_at(ONE)[0]
        v = kloosterman_general(fr, fr, ONE, ONE, G(2, 1), check_periodicity=True)
        assert v.terms > 0

    def test_scaling_covariance_h_i(self):
        # replacing pi by pi*h[i] (eta = i, eta^2 = -1) must twist the sum to
        # S(-m, -n; -C) computed on the original frames
        for q0 in [G(2), G(3)]:
            fr = frames_at(q0)[0]
            shifted = CuspFrame(
                q0=fr.q0,
                u=fr.u * I,
                w=fr.w * I,
                ut=-fr.ut * I,
                wt=-fr.wt * I,
                v=fr.v,
                mu_inv=fr.mu_inv,
                stab_index=fr.stab_index,
                beta_num=fr.beta_num,
            )
            for C in [G(2), G(1, 1) * G(1, 1)]:
                for m, n in [(ONE, G(1, 1))]:
                    lhs = kloosterman_general(shifted, shifted, m, n, C).value
                    rhs = kloosterman_general(fr, fr, -m, -n, -C).value
                    assert abs(lhs - rhs) < TOL


class TestTriplePath:
    def test_three_routes_agree_smallset(self):
        for q0 in [ONE, G(1, 1), G(2)]:
            for fr in frames_at(q0):
                for c in samecusp_moduli(fr, 16):
                    C = c.exact_div(fr.v)
                    for m, n in [(ONE, ONE), (ONE, G(0, 1))]:
                        s1 = kloosterman_samecusp(fr, m, n, c).value
                        s2 = kloosterman_general(fr, fr, m, n, C).value
                        bf = kloosterman_bruteforce(fr, fr, m, n, C)
                        assert bf.stabilized, (str(q0), str(fr.cusp()), str(C))
                        assert abs(s1 - s2) < TOL
                        assert abs(s1 - bf.value.value) < TOL

    def test_bruteforce_matches_classical_level_one(self):
        fr = frames_at(ONE)[0]
        for c in samecusp_moduli(fr, 10):
            for m, n in [(ONE, ONE), (G(2), G(1, 1))]:
                bf = kloosterman_bruteforce(fr, fr, m, n, c)
                assert bf.stabilized
                assert abs(bf.value.value - kloosterman_classical(m, n, c).value) < TOL

    def test_bruteforce_symmetry_relation(self):
        q0 = G(1, 1)
        frames = frames_at(q0)
        f1, f2 = frames[0], frames[1]
        from zisieve.cusps import allowed_reduced_moduli

        for C in allowed_reduced_moduli(f1, f2, 3.0)[:3]:
            a = kloosterman_bruteforce(f1, f2, ONE, G(1, 1), C)
            b = kloosterman_bruteforce(f2, f1, -G(1, 1), -ONE, C)
            assert a.stabilized and b.stabilized
            assert abs(a.value.value - b.value.value) < TOL

    def test_empty_cell_bruteforce(self):
        fr = next(f for f in frames_at(G(2)) if f.w == G(2))
        bf = kloosterman_bruteforce(fr, fr, ONE, ONE, ONE)
        assert bf.stabilized and bf.cosets == 0 and bf.value.value == 0


class TestFactorization:
    def test_unit_coprime_part(self):
        # C a pure level part: the simple factor is S(., .; 1) = 1
        fr = frames_at(G(1, 1))[0]
        C = G(1, 1) ** 3
        gen, simple = kloosterman_factor(fr, fr, ONE, G(2), C)
        assert simple.terms == 1 and abs(simple.value - 1.0) < TOL

    def test_identity_on_seeded_cases(self):
        rng = np.random.default_rng(20260810)
        q0s = [G(1, 1), G(2), G(3), G(2, 1)]
        count = 0
        while count < 30:
            q0 = q0s[rng.integers(len(q0s))]
            frames = frames_at(q0)
            f1 = frames[rng.integers(len(frames))]
            f2 = frames[rng.integers(len(frames))]
            C = G(int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
            if C.is_zero() or C.norm() > 20:
                continue
            m = G(int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
            n = G(int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
            whole = kloosterman_general(f1, f2, m, n, C).value
            gen, simple = kloosterman_factor(f1, f2, m, n, C)
            assert abs(whole - gen.value * simple.value) < TOL, (
                str(q0), str(f1.cusp()), str(f2.cusp()), str(C))
            count += 1


class TestBlocks:
    def test_full_block_matches_samecusp_absolute_value(self):
        for q0 in [G(1, 1), G(2)]:
            for fr in frames_at(q0):
                for c in samecusp_moduli(fr, 16)[:3]:
                    for m, n in [(ONE, ONE), (ONE, G(1, 1))]:
                        blk = samecusp_block(fr, c, c, m, n)
                        s = kloosterman_samecusp(fr, m, n, c).value
                        assert abs(abs(blk) - abs(s)) < TOL

    def test_crt_multiplicativity_sample(self):
        rng = np.random.default_rng(7)
        cases = 0
        while cases < 12:
            q0 = [ONE, G(1, 1), G(2)][rng.integers(3)]
            fr = frames_at(q0)[rng.integers(len(frames_at(q0)))]
            mods = [c for c in samecusp_moduli(fr, 120) if len(factorize(
                c.exact_div(fr.v * fr.w)).factors) >= 1]
            if not mods:
                continue
            c = mods[rng.integers(len(mods))]
            m = G(int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
            n = G(int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
            whole = samecusp_block(fr, c, c, m, n)
            prod = 1.0 + 0j
            fac = factorize(c)
            for p, e in fac.factors:
                block_mod = p**e
                cofactor = c.exact_div(block_mod)
                lam = mod_inverse(reduce_mod(cofactor, block_mod), block_mod)
                prod *= samecusp_block(fr, c, block_mod, lam * m, lam * n)
            assert abs(whole - prod) < 1e-8, (str(q0), str(fr.cusp()), str(c))
            cases += 1


class TestDelta:
    def test_inequivalent_is_zero(self):
        frames = frames_at(G(2))
        d = delta_term(frames[0], frames[1], ONE, ONE)
        assert d.value == 0 and d.contributing_cosets == 0

    def test_same_frame_index_two(self):
        q0 = G(9)
        fr = next(f for f in frames_at(q0) if f.stab_index == 2)
        d = delta_term(fr, fr, G(1, 1), G(1, 1))
        assert abs(d.value - 2.0) < TOL and d.contributing_cosets == 2
        d0 = delta_term(fr, fr, ONE, G(2))
        assert d0.value == 0

    def test_same_frame_index_four_negated_frequency(self):
        fr = frames_at(ONE)[0]
        assert fr.stab_index == 4
        w1 = G(1, 1)
        d = delta_term(fr, fr, w1, -w1)
        phase = np.exp(-2j * np.pi * float(fr.beta_phase(w1)))
        assert abs(d.value - 2.0 * phase) < TOL

    def test_formula_matches_bruteforce(self):
        for q0 in [ONE, G(1, 1), G(2)]:
            frames = frames_at(q0)
            for f1 in frames:
                for f2 in frames:
                    for w1, w2 in [(ONE, ONE), (ONE, -ONE), (G(1, 1), G(-1, 1)), (ONE, G(2))]:
                        ref = delta_term(f1, f2, w1, w2)
                        got, stabilized = delta_bruteforce(f1, f2, w1, w2)
                        assert stabilized
                        assert abs(ref.value - got.value) < TOL, (
                            str(q0), str(f1.cusp()), str(f2.cusp()), str(w1), str(w2))
                        assert ref.contributing_cosets == got.contributing_cosets


class TestGaussSum:
    def test_modulus_exact_small_primes(self):
        for prime in [G(2, 1), G(3), G(3, 2)]:
            for a in residues(prime, coprime_only=True)[:6]:
                s = gauss_sum_quadratic(a, prime)
                assert abs(abs(s) - abs(complex(prime))) < 1e-10

    def test_spec_anchor_three(self):
        for a in residues(G(3), coprime_only=True):
            s = gauss_sum_quadratic(a, G(3))
            assert abs(abs(s) - 3.0) < 1e-10


class TestBounds:
    def test_weil_estermann_small_exhaustive(self):
        for c in [G(1, 1), G(2), G(3), G(2, 1), G(3, 1)]:
            for m in residues(c):
                for n in residues(c):
                    rep = check_bounds("weil_estermann", {"m": m, "n": n, "c": c})
                    assert not rep.violations(), (str(c), str(m), str(n))

    def test_prime_power_bound(self):
        for prime, e in [(G(2, 1), 2), (G(3), 1), (G(1, 1), 3)]:
            for m, n in [(ONE, ONE), (ZERO, ONE), (G(2), G(1, 1))]:
                rep = check_bounds(
                    "weil_estermann_prime", {"m": m, "n": n, "prime": prime, "e": e})
                assert not rep.violations()

    def test_general_trivial_bound(self):
        fr = frames_at(G(2))[0]
        rep = check_bounds(
            "general_trivial", {"f1": fr, "f2": fr, "m": ONE, "n": ONE, "C": G(2)})
        assert not rep.violations()
