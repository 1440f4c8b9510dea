#include <exzero/characters.hpp>
#include <exzero/combinatorics.hpp>
#include <exzero/padic.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace exzero;

namespace {

Integer res(const PadicNumber& x, long k) { return x.residue(k); }

}  // namespace

TEST(Valuation, Basics) {
    EXPECT_EQ(ord(Integer(50), 5).value, 2);
    EXPECT_EQ(ord(Integer(1), 5).value, 0);
    EXPECT_EQ(ord(Rational(3, 25), 5).value, -2);
    EXPECT_TRUE(ord(Rational(0), 5).infinite);
}

TEST(Padic, ArithmeticTracksPrecision) {
    auto a = PadicNumber::from_rational(Rational(1, 3), 5, 4);
    auto b = PadicNumber::from_rational(Rational(1, 3) + 125, 5, 4);
    auto d = a - b;
    EXPECT_TRUE(d.is_zero() || d.valuation().value >= 3);
    // difference of values agreeing mod 5^3 keeps only the digits both know
    EXPECT_EQ(d.absolute_precision(), 4);
    EXPECT_EQ(res(a * PadicNumber::from_integer(3, 5, 4), 4), 1);
    auto q = PadicNumber::from_integer(10, 5, 3) / PadicNumber::from_integer(5, 5, 3);
    EXPECT_EQ(q.valuation().value, 0);
    EXPECT_EQ(res(q, 3), 2);
    EXPECT_LE((a + PadicNumber::from_integer(1, 5, 2)).absolute_precision(), 2);
}

TEST(Padic, Teichmuller) {
    EXPECT_EQ(res(teichmuller(1, 5, 3), 3), 1);
    EXPECT_EQ(res(teichmuller(2, 5, 3), 3), 57);
    EXPECT_EQ(res(teichmuller(4, 5, 2), 2), 24);
    EXPECT_THROW(teichmuller(10, 5, 3), std::domain_error);
    for (long a = 1; a < 7; ++a) {
        auto w = teichmuller(a, 7, 6);
        EXPECT_TRUE(agree(w.pow(6), PadicNumber::from_integer(1, 7, 6)));
    }
}

TEST(Padic, IwasawaLog) {
    EXPECT_TRUE(log_iwasawa(Rational(1), 5, 5).is_zero());
    EXPECT_TRUE(log_iwasawa(teichmuller(2, 5, 6)).is_zero());
    EXPECT_TRUE(log_iwasawa(Rational(5), 5, 5).is_zero());
    EXPECT_EQ(res(log_iwasawa(Rational(6), 5, 3), 3), 55);
    EXPECT_EQ(res(log_iwasawa(Rational(6), 5, 5), 5), 1805);
    EXPECT_EQ(res(log_iwasawa(Rational(8), 7, 5), 5), 14903);
    // log(xy) = log x + log y
    auto lhs = log_iwasawa(Rational(6 * 7, 11), 5, 8);
    auto rhs = log_iwasawa(Rational(6), 5, 8) + log_iwasawa(Rational(7), 5, 8) - log_iwasawa(Rational(11), 5, 8);
    EXPECT_TRUE(agree(lhs, rhs));
    EXPECT_THROW(log_iwasawa(PadicNumber::zero(5, 3)), std::domain_error);
}

TEST(Padic, ExpInvertsLog) {
    std::mt19937_64 rng(7);
    for (long p : {3L, 5L, 7L}) {
        for (int i = 0; i < 10; ++i) {
            long y = static_cast<long>(rng() % 1000);
            Rational x = 1 + Rational(p * y);
            auto back = exp_padic(log_iwasawa(x, p, 10));
            EXPECT_TRUE(congruent(back, PadicNumber::from_rational(x, p, 10), 9)) << p << " " << y;
        }
    }
    EXPECT_THROW(exp_padic(PadicNumber::from_integer(1, 5, 4)), std::domain_error);
}

TEST(Padic, DiamondIsOneModP) {
    for (long a = 1; a < 50; ++a) {
        if (a % 7 == 0) continue;
        auto x = PadicNumber::from_integer(a, 7, 6);
        auto d = x / teichmuller(a, 7, 6);
        EXPECT_EQ(res(d, 1), 1);
    }
}

TEST(Padic, UnitRoot) {
    EXPECT_TRUE(agree(unit_root(1 + 5, 5, 6), PadicNumber::from_integer(1, 5, 6)));
    EXPECT_EQ(res(unit_root(-1, 3, 2), 2), 2);
    EXPECT_EQ(res(unit_root(2, 7, 3), 3), 121);
    EXPECT_THROW(unit_root(0, 5, 3), std::domain_error);
    for (long ap : {-3L, -2L, -1L, 1L, 2L, 4L}) {
        auto a = unit_root(ap, 5, 8);
        auto ap_ = PadicNumber::from_integer(ap, 5, 8);
        EXPECT_TRUE(agree(a * (ap_ - a), PadicNumber::from_integer(5, 5, 8)));
    }
}

TEST(Characters, Psi) {
    AdditiveCharacterPsi psi{5};
    EXPECT_TRUE(exact_equal(psi(Rational(7)), CValue(1)));
    EXPECT_TRUE(exact_equal(psi(Rational(1, 5)) * psi(Rational(4, 5)), CValue(1)));
    EXPECT_TRUE(exact_equal(psi(Rational(3, 25)) * psi(Rational(2, 3)), psi(Rational(3, 25) + Rational(2, 3))));
}

TEST(Characters, Conductor) {
    auto legendre = Quasicharacter::from_generator(5, 1, 2, CValue(1));
    EXPECT_EQ(legendre.conductor_exponent(), 1);
    // a character mod 25 factoring through mod 5 drops to conductor 1
    auto imprimitive = Quasicharacter::from_generator(5, 2, 5, CValue(1));
    EXPECT_EQ(imprimitive.conductor_exponent(), 1);
    auto trivial = Quasicharacter::from_generator(5, 2, 20, CValue(1));
    EXPECT_EQ(trivial.conductor_exponent(), 0);
    EXPECT_TRUE(exact_equal(legendre.at_unit(4), CValue(1)));
    EXPECT_TRUE(exact_equal(legendre.at_unit(2), CValue(-1)));
}

TEST(Characters, GaussSums) {
    EXPECT_TRUE(exact_equal(gauss_sum(Quasicharacter::unramified(5, CValue(3))), CValue(1)));
    auto legendre = Quasicharacter::from_generator(5, 1, 2, CValue(1));
    auto tau = gauss_sum(legendre);
    EXPECT_TRUE(exact_equal(tau * tau.conj(), CValue(5)));
    // quadratic Gauss sum at p = 5 is sqrt(5) for this ψ
    EXPECT_NEAR(tau.to_complex().real(), std::sqrt(5.0), 1e-12);
    auto quartic = Quasicharacter::from_generator(5, 1, 1, CValue(1));
    EXPECT_NEAR(std::norm(gauss_sum(quartic).to_complex()), 5.0, 1e-9);
    auto chi = Quasicharacter::from_generator(7, 2, 1, CValue(1));
    auto t = gauss_sum(chi);
    EXPECT_TRUE(exact_equal(t * gauss_sum(chi.inverse()), chi.at_minus_one() * CValue(49)));
}

TEST(Characters, PsiCosetVanishing) {
    // Σ_u ψ(au)χ(u) over unit residues vanishes unless ord(a) = -f
    AdditiveCharacterPsi psi{5};
    for (long k : {1L, 2L, 3L, 5L}) {
        auto chi = Quasicharacter::from_generator(5, 2, k, CValue(1));
        long f = chi.conductor_exponent();
        for (long e = -f - 1; e <= 0; ++e) {
            if (e == -f) continue;
            long depth = std::max<long>(f, -e);
            long m = to_long(ipow(5, static_cast<unsigned long>(depth)));
            CValue s(0);
            for (long u = 1; u < m; ++u)
                if (u % 5) s += psi(rpow(5, e) * u) * chi.at_unit(u);
            EXPECT_TRUE(s.is_exact_zero()) << k << " " << e;
        }
    }
}

TEST(Characters, MellinClosedForm) {
    EXPECT_TRUE(exact_equal(mellin_closed_form(Quasicharacter::unramified(5, CValue(1))), CValue(0)));
    EXPECT_TRUE(exact_equal(mellin_closed_form(Quasicharacter::unramified(5, CValue(2))), CValue(Rational(5, 6))));
    auto legendre = Quasicharacter::from_generator(5, 1, 2, CValue(1));
    EXPECT_TRUE(exact_equal(mellin_closed_form(legendre), gauss_sum(legendre)));
    EXPECT_THROW(mellin_closed_form(Quasicharacter::unramified(5, CValue(5))), std::domain_error);
    EXPECT_THROW(mellin_closed_form(Quasicharacter::unramified(5, CValue(7))), std::domain_error);
}

TEST(Characters, EulerFactors) {
    auto triv = Quasicharacter::unramified(5, CValue(1));
    EXPECT_TRUE(exact_equal(euler_factor(CValue(1), triv), CValue(0)));
    EXPECT_TRUE(exact_equal(euler_factor(CValue(-1), triv), CValue(2)));
    auto ram = Quasicharacter::from_generator(5, 2, 1, CValue(1));
    EXPECT_TRUE(exact_equal(euler_factor(CValue(3), ram), CValue(Rational(1, 9))));
    EXPECT_TRUE(exact_equal(euler_factor(CValue(2), triv), CValue(Rational(1, 4))));
}

TEST(Characters, LocalL) {
    auto triv = Quasicharacter::unramified(5, CValue(1));
    EXPECT_TRUE(exact_equal(local_L(Rational(1, 2), CValue(1), triv), CValue(Rational(5, 4))));
    EXPECT_TRUE(exact_equal(local_L(Rational(1, 2), CValue(2), triv), CValue(Rational(10, 3))));
    auto legendre = Quasicharacter::from_generator(5, 1, 2, CValue(1));
    EXPECT_TRUE(exact_equal(local_L(Rational(1, 2), CValue(2), legendre), CValue(1)));
    EXPECT_THROW(local_L(Rational(-1, 2), CValue(1), triv), std::domain_error);
}

TEST(DetExpansion, SmallCases) {
    auto one = det_fixedpointfree_expansion({{Integer(4), Integer(-4)}});
    EXPECT_EQ(one.determinant, 4);
    EXPECT_EQ(one.expansion, 4);
    auto two = det_fixedpointfree_expansion({{Integer(1), Integer(-1)}, {Integer(-1), Integer(1)}});
    EXPECT_EQ(two.determinant, 0);
    EXPECT_EQ(two.admissible_maps, 0);
    EXPECT_EQ(two.expansion, 0);
    EXPECT_THROW(det_fixedpointfree_expansion({{Integer(1), Integer(1)}}), std::invalid_argument);
}

TEST(DetExpansion, RandomAndColumnShuffle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t k = 1 + rng() % 4;
        std::size_t m = k + 1 + rng() % (5 - k + 0);
        if (m > 5) m = 5;
        IntMatrix a(k, std::vector<Integer>(m));
        for (auto& row : a) {
            long s = 0;
            for (std::size_t j = 0; j + 1 < m; ++j) {
                long v = static_cast<long>(rng() % 19) - 9;
                row[j] = v;
                s += v;
            }
            row[m - 1] = -s;
        }
        auto r = det_fixedpointfree_expansion(a);
        EXPECT_EQ(r.determinant, r.expansion);
        for (auto& row : a) std::reverse(row.begin() + static_cast<long>(k), row.end());
        auto s = det_fixedpointfree_expansion(a);
        EXPECT_EQ(s.determinant, s.expansion);
        EXPECT_EQ(s.determinant, r.determinant);
    }
}
