#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <stdexcept>
#include <vector>

// Truncated formal power series c_0 + c_1 z + ... + c_K z^K over a scalar
// field. Two scalar kinds are used throughout the project: exact rationals
// (boost cpp_rational) for combinatorial identities and complex doubles for
// the analytic layer. The kinds never mix; each instantiation is its own type.

namespace freeconv::series {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

template <class S>
struct TruncatedSeries {
    std::vector<S> c;  // size order()+1

    TruncatedSeries() : c(1, S(0)) {}
    explicit TruncatedSeries(int order) : c(static_cast<size_t>(order) + 1, S(0)) {
        if (order < 0) throw std::invalid_argument("TruncatedSeries: negative order");
    }
    TruncatedSeries(std::initializer_list<S> init) : c(init) {
        if (c.empty()) throw std::invalid_argument("TruncatedSeries: empty coefficient list");
    }
    explicit TruncatedSeries(std::vector<S> coeffs) : c(std::move(coeffs)) {
        if (c.empty()) throw std::invalid_argument("TruncatedSeries: empty coefficient list");
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
    const S& operator[](int k) const { return c[static_cast<size_t>(k)]; }
    S& operator[](int k) { return c[static_cast<size_t>(k)]; }

    bool operator==(const TruncatedSeries& o) const { return c == o.c; }
};

template <class S>
TruncatedSeries<S> ser_identity(int order) {  // the series "z"
    TruncatedSeries<S> g(order);
    if (order >= 1) g[1] = S(1);
    return g;
}

template <class S>
TruncatedSeries<S> ser_constant(const S& v, int order) {
    TruncatedSeries<S> g(order);
    g[0] = v;
    return g;
}

namespace detail {
template <class S>
void require_same_order(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    if (a.order() != b.order()) throw std::invalid_argument("series: order mismatch");
}
inline bool is_zero(const Rational& v) { return v == 0; }
inline bool is_zero(const Complex& v) { return v == Complex(0.0, 0.0); }
inline bool is_zero(double v) { return v == 0.0; }
}  // namespace detail

template <class S>
TruncatedSeries<S> ser_add(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    detail::require_same_order(a, b);
    TruncatedSeries<S> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
    return r;
}

template <class S>
TruncatedSeries<S> ser_sub(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    detail::require_same_order(a, b);
    TruncatedSeries<S> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
    return r;
}

/// Cauchy product truncated at the common order.
template <class S>
TruncatedSeries<S> ser_mul(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    detail::require_same_order(a, b);
    const int K = a.order();
    TruncatedSeries<S> r(K);
    for (int i = 0; i <= K; ++i) {
        if (detail::is_zero(a[i])) continue;
        for (int j = 0; i + j <= K; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <class S>
TruncatedSeries<S> ser_scale(const TruncatedSeries<S>& a, const S& v) {
    TruncatedSeries<S> r(a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] * v;
    return r;
}

/// b with a*b = 1 + O(z^{K+1}); requires a nonzero constant term.
template <class S>
TruncatedSeries<S> ser_reciprocal(const TruncatedSeries<S>& a) {
    if (detail::is_zero(a[0])) throw std::invalid_argument("ser_reciprocal: zero constant term");
    const int K = a.order();
    TruncatedSeries<S> b(K);
    b[0] = S(1) / a[0];
    for (int k = 1; k <= K; ++k) {
        S acc = S(0);
        for (int j = 1; j <= k; ++j) acc += a[j] * b[k - j];
        b[k] = -acc / a[0];
    }
    return b;
}

template <class S>
TruncatedSeries<S> ser_div(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    return ser_mul(a, ser_reciprocal(b));
}

/// f(g(z)) truncated, by Horner evaluation in the series ring; g must have
/// zero constant term so that truncation commutes with substitution.
template <class S>
TruncatedSeries<S> ser_compose(const TruncatedSeries<S>& f, const TruncatedSeries<S>& g) {
    detail::require_same_order(f, g);
    if (!detail::is_zero(g[0])) throw std::invalid_argument("ser_compose: inner series has nonzero constant term");
    const int K = f.order();
    TruncatedSeries<S> r(K);
    r[0] = f[K];
    for (int k = K - 1; k >= 0; --k) {
        r = ser_mul(r, g);
        r[0] += f[k];
    }
    return r;
}

/// Compositional inverse: g with f(g(z)) = z + O(z^{K+1}).
/// Needs f(0) = 0 and f'(0) != 0. Direct coefficient recursion: with g known
/// through order k-1, the z^k defect of f(g) is linear in the next
/// coefficient with slope f'(0).
template <class S>
TruncatedSeries<S> ser_reversion(const TruncatedSeries<S>& f) {
    const int K = f.order();
    if (!detail::is_zero(f[0])) throw std::invalid_argument("ser_reversion: constant term must vanish");
    if (K < 1 || detail::is_zero(f[1])) throw std::invalid_argument("ser_reversion: linear term must be nonzero");
    TruncatedSeries<S> g(K);
    g[1] = S(1) / f[1];
    for (int k = 2; k <= K; ++k) {
        const auto fg = ser_compose(f, g);
        g[k] = -fg[k] / f[1];
    }
    return g;
}

enum class ExpLog { exp, log };

/// Formal exponential / logarithm via the first-order recursions
/// (exp a)' = a' exp a and (log a)' = a'/a. The exact-rational kind keeps
/// everything rational, so exp requires a_0 = 0 there; log requires a_0 = 1
/// for both kinds.
template <class S>
TruncatedSeries<S> ser_exp_log(const TruncatedSeries<S>& a, ExpLog direction) {
    const int K = a.order();
    TruncatedSeries<S> b(K);
    if (direction == ExpLog::exp) {
        if constexpr (std::is_same_v<S, Rational>) {
            if (!detail::is_zero(a[0]))
                throw std::invalid_argument("ser_exp_log: rational exp needs zero constant term");
            b[0] = S(1);
        } else {
            b[0] = std::exp(a[0]);
        }
        for (int k = 1; k <= K; ++k) {
            S acc = S(0);
            for (int j = 1; j <= k; ++j) acc += S(j) * a[j] * b[k - j];
            b[k] = acc / S(k);
        }
    } else {
        if (a[0] != S(1)) throw std::invalid_argument("ser_exp_log: log needs constant term 1");
        b[0] = S(0);
        for (int k = 1; k <= K; ++k) {
            S acc = S(k) * a[k];
            for (int j = 1; j < k; ++j) acc -= S(j) * b[j] * a[k - j];
            b[k] = acc / S(k);
        }
    }
    return b;
}

}  // namespace freeconv::series
