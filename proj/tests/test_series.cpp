#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "freeconv/series.hpp"
#include "oracles.hpp"

using namespace freeconv::series;
using R = Rational;
template <class S>
using TS = TruncatedSeries<S>;

namespace {

TS<R> random_series(std::mt19937_64& gen, int K) {
    TS<R> s(K);
    for (int k = 0; k <= K; ++k) s[k] = oracles::random_rational(gen);
    return s;
}

TS<Complex> to_complex(const TS<R>& s) {
    TS<Complex> c(s.order());
    for (int k = 0; k <= s.order(); ++k) c[k] = Complex(static_cast<double>(s[k]), 0.0);
    return c;
}

double max_rel_err(const TS<Complex>& got, const TS<R>& want) {
    double worst = 0;
    for (int k = 0; k <= want.order(); ++k) {
        const double w = static_cast<double>(want[k]);
        const double scale = std::max(1.0, std::abs(w));
        worst = std::max(worst, std::abs(got[k] - Complex(w, 0.0)) / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("ser_mul") {
    TS<R> onepz{R(1), R(1), R(0)};
    TS<R> onemz{R(1), R(-1), R(0)};
    CHECK(ser_mul(onepz, onemz) == TS<R>{R(1), R(0), R(-1)});

    TS<R> a{R(2), R(-3), R(5)};
    CHECK(ser_mul(a, ser_constant(R(1), 2)) == a);

    TS<R> q{R(1), R(1), R(1)};
    CHECK(ser_mul(q, onepz) == TS<R>{R(1), R(2), R(2)});

    CHECK_THROWS_AS(ser_mul(a, TS<R>(3)), std::invalid_argument);
}

TEST_CASE("ser_reciprocal") {
    TS<R> onemz{R(1), R(-1), R(0), R(0)};
    CHECK(ser_reciprocal(onemz) == TS<R>{R(1), R(1), R(1), R(1)});

    TS<R> b{R(2), R(1)};
    CHECK(ser_reciprocal(b) == TS<R>{R(1, 2), R(-1, 4)});

    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 20; ++rep) {
        auto a = random_series(gen, 6);
        if (a[0] == 0) a[0] = R(1);
        CHECK(ser_reciprocal(ser_reciprocal(a)) == a);
        auto prod = ser_mul(a, ser_reciprocal(a));
        CHECK(prod == ser_constant(R(1), 6));
    }

    TS<R> z{R(0), R(1)};
    CHECK_THROWS_AS(ser_reciprocal(z), std::invalid_argument);
}

TEST_CASE("ser_compose") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 10; ++rep) {
        const auto f = random_series(gen, 5);
        CHECK(ser_compose(f, ser_identity<R>(5)) == f);
    }

    // exp-series o log(1+z)-series = 1 + z, coefficients written out by hand
    TS<R> exps{R(1), R(1), R(1, 2), R(1, 6), R(1, 24)};
    TS<R> logs{R(0), R(1), R(-1, 2), R(1, 3), R(-1, 4)};
    CHECK(ser_compose(exps, logs) == TS<R>{R(1), R(1), R(0), R(0), R(0)});

    TS<R> onepz{R(1), R(1), R(0), R(0), R(0)};
    TS<R> zsq{R(0), R(0), R(1), R(0), R(0)};
    CHECK(ser_compose(onepz, zsq) == TS<R>{R(1), R(0), R(1), R(0), R(0)});

    CHECK_THROWS_AS(ser_compose(onepz, onepz), std::invalid_argument);
}

TEST_CASE("ser_reversion") {
    CHECK(ser_reversion(ser_identity<R>(4)) == ser_identity<R>(4));

    TS<R> f{R(0), R(1), R(1), R(0)};
    CHECK(ser_reversion(f) == TS<R>{R(0), R(1), R(-1), R(2)});

    SECTION("two-sided inverse and involution on random inputs") {
        std::mt19937_64 gen(13);
        for (int rep = 0; rep < 20; ++rep) {
            auto f = random_series(gen, 6);
            f[0] = R(0);
            if (f[1] == 0) f[1] = R(1);
            const auto g = ser_reversion(f);
            CHECK(ser_compose(f, g) == ser_identity<R>(6));
            CHECK(ser_compose(g, f) == ser_identity<R>(6));
            CHECK(ser_reversion(g) == f);
        }
    }

    CHECK_THROWS_AS(ser_reversion(TS<R>{R(1), R(1)}), std::invalid_argument);
    CHECK_THROWS_AS(ser_reversion(TS<R>{R(0), R(0), R(1)}), std::invalid_argument);
}

TEST_CASE("ser_exp_log") {
    TS<R> onepz{R(1), R(1), R(0), R(0)};
    CHECK(ser_exp_log(onepz, ExpLog::log) == TS<R>{R(0), R(1), R(-1, 2), R(1, 3)});

    CHECK(ser_exp_log(TS<R>(3), ExpLog::exp) == ser_constant(R(1), 3));

    TS<R> sq{R(1), R(2), R(1), R(0), R(0)};
    CHECK(ser_exp_log(ser_exp_log(sq, ExpLog::log), ExpLog::exp) == sq);

    SECTION("mutually inverse on random inputs") {
        std::mt19937_64 gen(17);
        for (int rep = 0; rep < 20; ++rep) {
            auto a = random_series(gen, 6);
            a[0] = R(0);
            CHECK(ser_exp_log(ser_exp_log(a, ExpLog::exp), ExpLog::log) == a);
        }
    }

    CHECK_THROWS_AS(ser_exp_log(TS<R>{R(2), R(1)}, ExpLog::log), std::invalid_argument);
    CHECK_THROWS_AS(ser_exp_log(TS<R>{R(1, 2), R(1)}, ExpLog::exp), std::invalid_argument);
}

TEST_CASE("ring axioms on exact rationals") {
    std::mt19937_64 gen(19);
    for (int rep = 0; rep < 30; ++rep) {
        const int K = 8;
        const auto a = random_series(gen, K);
        const auto b = random_series(gen, K);
        const auto c = random_series(gen, K);
        CHECK(ser_mul(ser_mul(a, b), c) == ser_mul(a, ser_mul(b, c)));
        CHECK(ser_mul(a, ser_add(b, c)) == ser_add(ser_mul(a, b), ser_mul(a, c)));
        CHECK(ser_mul(a, b) == ser_mul(b, a));
    }
}

TEST_CASE("exact-rational and complex-float paths agree") {
    std::mt19937_64 gen(23);
    const int K = 12;
    for (int rep = 0; rep < 15; ++rep) {
        auto a = random_series(gen, K);
        auto b = random_series(gen, K);
        CHECK(max_rel_err(ser_mul(to_complex(a), to_complex(b)), ser_mul(a, b)) < 1e-12);

        a[0] = R(3, 2);  // keep the reciprocal well-conditioned
        CHECK(max_rel_err(ser_reciprocal(to_complex(a)), ser_reciprocal(a)) < 1e-12);

        b[0] = R(0);
        if (b[1] == 0) b[1] = R(1);
        CHECK(max_rel_err(ser_compose(to_complex(a), to_complex(b)), ser_compose(a, b)) < 1e-12);
        CHECK(max_rel_err(ser_reversion(to_complex(b)), ser_reversion(b)) < 1e-10);
    }
}
