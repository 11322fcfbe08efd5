#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "freeconv/cumulants.hpp"
#include "freeconv/families.hpp"
#include "oracles.hpp"

using namespace freeconv;
using namespace freeconv::families;
using measures::CircleMomentSeq;
using Catch::Matchers::WithinAbs;

namespace {

CircleMomentSeq random_mstar(std::mt19937_64& gen, int K) {
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> wraw(0.2, 1.0);
    while (true) {
        std::vector<std::pair<double, double>> atoms;
        double total = 0;
        const int k = 1 + static_cast<int>(gen() % 3);
        for (int i = 0; i < k; ++i) {
            atoms.emplace_back(angle(gen), wraw(gen));
            total += atoms.back().second;
        }
        for (auto& [th, w] : atoms) w /= total;
        const auto m = CircleMomentSeq::from_atoms(atoms, K);
        if (std::abs(m[1]) > 0.2) return m;
    }
}

}  // namespace

TEST_CASE("family_R closed forms") {
    const Complex z(0.1, -0.2);
    CHECK(family_R(Dirac{1.5}, z) == Complex(1.5, 0.0));

    SECTION("point-mass generator at zero gives the semicircle R") {
        const FreeLK lk{0.0, FiniteMeasure({{0.0, 2.5}})};
        for (const Complex w : {z, Complex(0.0, -0.4), Complex(-0.2, -0.3)})
            CHECK(std::abs(family_R(lk, w) - 2.5 * w) < 1e-14);
    }

    SECTION("free stable boundary case alpha=2 is the unit semicircle") {
        const FreeStable st{1, 2.0, 0.0, {0, 0}, 0};
        for (double re : {-0.3, 0.0, 0.3})
            for (double im : {-0.5, -0.1}) {
                const Complex w(re, im);
                CHECK(std::abs(family_R(st, w) - w) < 1e-12);
                CHECK(std::abs(family_R(st, w) - family_R(Semicircle{1.0}, w)) < 1e-12);
            }
    }

    SECTION("Cauchy R is constant") {
        for (const Complex w : {Complex(0.1, -0.3), Complex(-0.2, -0.1)})
            CHECK(std::abs(family_R(Cauchy{0.0, 1.0}, w) - Complex(0.0, -1.0)) < 1e-14);
    }
}

TEST_CASE("family parameter validation") {
    CHECK_THROWS_AS(validate(FamilySpec(FreeStable{1, 0.8, 0.0, {0, 0}, 0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(FamilySpec(FreeStable{1, 2.0, 0.5, {0, 0}, 0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(FamilySpec(FreeStable{3, 0.5, 0.0, {0, 0}, 0})), std::invalid_argument);
    CHECK_NOTHROW(validate(FamilySpec(FreeStable{3, 0.5, 1.2, {0, 0}, 0})));
    // case 2: b >= -Im(a)/pi
    CHECK_NOTHROW(validate(FamilySpec(FreeStable{2, 0, 0, {0.0, 1.0}, -0.3})));
    CHECK_THROWS_AS(validate(FamilySpec(FreeStable{2, 0, 0, {0.0, 1.0}, -0.4})), std::invalid_argument);
    CHECK_THROWS_AS(validate(FamilySpec(FreeStable{2, 0, 0, {0.0, -1.0}, 1.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(FamilySpec(Semicircle{-1.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(FamilySpec(FreeBinomial{3, 4.0, 1.0})), std::invalid_argument);
}

TEST_CASE("family_density") {
    CHECK_THAT(family_density(Semicircle{1.0}, 0.0), WithinAbs(1.0 / std::numbers::pi, 1e-15));
    CHECK_THAT(family_density(Arcsine{0.0, 2.0}, 1.0), WithinAbs(1.0 / std::numbers::pi, 1e-15));
    CHECK_THAT(family_density(Cauchy{0.0, 1.0}, 0.0), WithinAbs(1.0 / std::numbers::pi, 1e-15));
    CHECK(family_density(Semicircle{1.0}, 2.5) == 0.0);
    CHECK(family_density(Arcsine{0.0, 2.0}, -0.5) == 0.0);
    CHECK_THROWS_AS(family_density(Dirac{0.0}, 0.0), std::domain_error);
}

TEST_CASE("family_moments") {
    SECTION("semicircle: Catalan moments, checked against quadrature of the density") {
        const auto m = family_moments(Semicircle{1.0}, 6);
        const std::vector<double> expect{0, 1, 0, 2, 0, 5};
        for (int n = 1; n <= 6; ++n) CHECK_THAT(m[n], WithinAbs(expect[static_cast<size_t>(n) - 1], 1e-13));
        for (int n = 1; n <= 6; ++n) {
            const double quad = oracles::trapezoid(
                [n](double x) { return std::pow(x, n) * family_density(Semicircle{1.0}, x); }, -2.0, 2.0,
                400000);
            CHECK_THAT(m[n], WithinAbs(quad, 1e-5));
        }
    }

    SECTION("free binomial at n=1 is the base Bernoulli") {
        const auto m = family_moments(FreeBinomial{1, 0.5, 1.0}, 5);
        for (int n = 1; n <= 5; ++n) CHECK_THAT(m[n], WithinAbs(0.5, 1e-13));
    }

    SECTION("heavy-tailed families are rejected") {
        CHECK_THROWS_AS(family_moments(Cauchy{0.0, 1.0}, 2), std::domain_error);
        CHECK_THROWS_AS(family_moments(FreeStable{1, 1.5, -0.25, {0, 0}, 0}, 2), std::domain_error);
    }
}

TEST_CASE("free Poisson: both printed descriptions, discrepancy reported") {
    const double lambda = 0.75, t = 2.0;
    const auto paper = family_cumulants(FreePoisson{lambda, t, FreePoissonVariant::paper_r}, 4);
    CHECK_THAT(paper[0], WithinAbs(lambda * t, 1e-14));
    CHECK_THAT(paper[1], WithinAbs(lambda * (1 + t * t), 1e-14));
    CHECK_THAT(paper[2], WithinAbs(lambda * t * (1 + t * t), 1e-14));

    const auto limit = family_cumulants(FreePoisson{lambda, t, FreePoissonVariant::binomial_limit}, 4);
    for (int n = 1; n <= 4; ++n)
        CHECK_THAT(limit[static_cast<size_t>(n) - 1], WithinAbs(lambda * std::pow(t, n), 1e-14));

    const auto cmp = free_poisson_comparison(lambda, t);
    CHECK(cmp.n == 10000);
    CHECK(cmp.binomial_limit_rel_err <= 1e-3);
    CHECK_THAT(cmp.c2_paper_r, WithinAbs(lambda * (1 + t * t), 1e-14));
    CHECK_THAT(cmp.c2_binomial_limit, WithinAbs(lambda * t * t, 1e-14));
    CHECK_THAT(cmp.discrepancy, WithinAbs(lambda, 1e-12));  // lambda(1+t^2) - lambda t^2
}

TEST_CASE("psi_series") {
    const auto atom = psi_series(CircleMomentSeq::atom(0.7, 5));
    for (int n = 1; n <= 5; ++n) CHECK(std::abs(atom[n] - std::polar(1.0, 0.7 * n)) < 1e-14);

    const auto zero = psi_series(CircleMomentSeq(std::vector<std::complex<double>>(4, {0.0, 0.0})));
    for (int n = 0; n <= 4; ++n) CHECK(zero[n] == Complex(0.0, 0.0));

    SECTION("symmetric two-atom mixture") {
        const double p = 0.8;
        const auto m = CircleMomentSeq::from_atoms({{0.0, p}, {std::numbers::pi, 1 - p}}, 5);
        const auto psi = psi_series(m);
        for (int n = 1; n <= 5; ++n) {
            const double expect = (n % 2 == 0) ? 1.0 : 2 * p - 1;
            CHECK(std::abs(psi[n] - Complex(expect, 0.0)) < 1e-13);
        }
    }
}

TEST_CASE("sigma_series") {
    SECTION("atoms have constant Sigma = 1/omega") {
        for (double th : {0.0, 0.4, 2.2}) {
            const auto sigma = sigma_series(CircleMomentSeq::atom(th, 5));
            CHECK(std::abs(sigma[0] - 1.0 / std::polar(1.0, th)) < 1e-13);
            for (int k = 1; k <= sigma.order(); ++k) CHECK(std::abs(sigma[k]) < 1e-12);
        }
    }
    SECTION("Sigma(0) = 1/m_1") {
        std::mt19937_64 gen(79);
        for (int rep = 0; rep < 10; ++rep) {
            const auto m = random_mstar(gen, 5);
            CHECK(std::abs(sigma_series(m)[0] - 1.0 / m[1]) < 1e-12);
        }
    }
    CHECK_THROWS_AS(sigma_series(CircleMomentSeq(std::vector<std::complex<double>>(3, {0.0, 0.0}))),
                    std::domain_error);
}

TEST_CASE("mult_convolve") {
    SECTION("rotations compose") {
        const auto c = mult_convolve(CircleMomentSeq::atom(0.9, 5), CircleMomentSeq::atom(1.3, 5), 5);
        const auto expect = CircleMomentSeq::atom(2.2, 5);
        for (int n = 1; n <= 5; ++n) CHECK(std::abs(c[n] - expect[n]) < 1e-12);
    }

    SECTION("first and second moments obey the freeness formulas") {
        std::mt19937_64 gen(83);
        for (int rep = 0; rep < 20; ++rep) {
            const auto a = random_mstar(gen, 4);
            const auto b = random_mstar(gen, 4);
            const auto c = mult_convolve(a, b, 4);
            CHECK(std::abs(c[1] - a[1] * b[1]) < 1e-12);
            const Complex m2 = a[2] * b[1] * b[1] + a[1] * a[1] * b[2] - a[1] * a[1] * b[1] * b[1];
            CHECK(std::abs(c[2] - m2) < 1e-12);
        }
    }

    SECTION("commutative, associative, with the delta_1 atom as identity") {
        std::mt19937_64 gen(89);
        const auto id = CircleMomentSeq::atom(0.0, 6);
        for (int rep = 0; rep < 10; ++rep) {
            const auto a = random_mstar(gen, 6);
            const auto b = random_mstar(gen, 6);
            const auto ab = mult_convolve(a, b, 6);
            const auto ba = mult_convolve(b, a, 6);
            for (int n = 1; n <= 6; ++n) CHECK(std::abs(ab[n] - ba[n]) < 1e-10);
            const auto aid = mult_convolve(a, id, 6);
            for (int n = 1; n <= 6; ++n) CHECK(std::abs(aid[n] - a[n]) < 1e-10);
            const auto cseq = random_mstar(gen, 6);
            const auto left = mult_convolve(mult_convolve(a, b, 6), cseq, 6);
            const auto right = mult_convolve(a, mult_convolve(b, cseq, 6), 6);
            for (int n = 1; n <= 6; ++n) CHECK(std::abs(left[n] - right[n]) < 1e-10);
        }
    }
}

TEST_CASE("mult_LK_sigma") {
    SECTION("empty generator is the boxtimes identity") {
        const MultLK id{0.0, FiniteMeasure()};
        for (double r : {0.0, 0.3, 0.8})
            CHECK(std::abs(mult_LK_sigma(id, std::polar(r, 0.5)) - Complex(1.0, 0.0)) < 1e-14);
    }
    SECTION("pure drift has constant modulus one") {
        const MultLK rot{1.1, FiniteMeasure()};
        for (double r : {0.1, 0.5, 0.9}) {
            const auto s = mult_LK_sigma(rot, std::polar(r, -0.7));
            CHECK_THAT(std::abs(s), WithinAbs(1.0, 1e-14));
        }
    }
    SECTION("nonnegative real part of the exponent forces |Sigma| >= 1") {
        const MultLK lk{0.4, FiniteMeasure({{0.3, 0.5}, {2.0, 0.25}})};
        for (int i = 0; i < 50; ++i) {
            const double r = 0.9 * (i + 1) / 51.0;
            const double th = 2 * std::numbers::pi * i / 50.0;
            const Complex z = std::polar(r, th);
            Complex u(0.0, lk.alpha);
            for (const auto& [theta, w] : lk.nu.atoms) {
                const Complex xi = std::polar(1.0, theta);
                u += w * (1.0 + xi * z) / (1.0 - xi * z);
            }
            CHECK(u.real() >= -1e-13);
            CHECK(std::abs(mult_LK_sigma(lk, z)) >= 1.0 - 1e-12);
        }
    }
    CHECK_THROWS_AS(mult_LK_sigma(MultLK{0.0, FiniteMeasure()}, Complex(1.0, 0.5)), std::domain_error);
}

TEST_CASE("semicircle cumulants are (0, sigma, 0, ...)") {
    for (double sigma : {0.25, 1.0, 3.0}) {
        const auto C = cumulants::m2c(family_moments(Semicircle{sigma}, 8));
        CHECK_THAT(C[1], WithinAbs(0.0, 1e-12));
        CHECK_THAT(C[2], WithinAbs(sigma, 1e-12));
        for (int n = 3; n <= 8; ++n) CHECK_THAT(C[n], WithinAbs(0.0, 1e-11));
    }
}

TEST_CASE("arcsine equals the free square of the fair Bernoulli") {
    const auto arc = family_moments(Arcsine{0.0, 2.0}, 8);
    const auto bern = measures::moments_of(measures::AtomicMeasure::bernoulli(0.5), 8);
    const auto conv = cumulants::free_add_convolve(bern, bern);
    for (int n = 1; n <= 8; ++n) CHECK_THAT(arc[n], WithinAbs(conv[n], 1e-10));
}

TEST_CASE("Levy-Khintchine generators: Nevanlinna direction and the vanishing limit") {
    const FreeLK lk{0.3, FiniteMeasure({{-1.0, 0.4}, {0.0, 0.2}, {1.5, 0.3}})};
    SECTION("R(1/zeta) lies in the closed lower half-plane for zeta in C+") {
        for (int i = 0; i < 50; ++i) {
            const double re = -2.0 + 4.0 * i / 49.0;
            const double im = 0.2 + 2.0 * (i % 7);
            const Complex zeta(re, im);
            const Complex val = family_R(lk, 1.0 / zeta);
            CHECK(val.imag() <= 1e-12);
        }
    }
    SECTION("y R(iy) -> 0 as y decreases to 0") {
        double prev = std::numeric_limits<double>::infinity();
        for (double y : {1e-1, 1e-2, 1e-3}) {
            const double v = std::abs(y * family_R(lk, Complex(0.0, y)));
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 1e-2);
    }
}

TEST_CASE("free stable case 1 at alpha=2 reproduces the semicircle R on a grid") {
    const FreeStable st{1, 2.0, 0.0, {0, 0}, 0};
    for (int i = 0; i < 20; ++i) {
        const Complex z(-0.4 + 0.04 * i, -0.05 - 0.02 * i);
        CHECK(std::abs(family_R(st, z) - family_R(Semicircle{1.0}, z)) < 1e-12);
    }
}
