#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeconv/measures.hpp"
#include "freeconv/ncpart.hpp"
#include "freeconv/series.hpp"

// Moment <-> free-cumulant transforms and everything built on them: free
// additive convolution at the moment level, convolution powers, free
// compression with a feasibility verdict, and mixed moments of words in free
// variables. The transforms run over any scalar field; the test suite uses
// the exact-rational instantiation to check the identities exactly.

namespace freeconv::cumulants {

using ncpart::Partition;
using series::Rational;

/// Truncated free cumulant sequence C_1..C_K.
struct CumulantSeq {
    std::vector<double> C;

    CumulantSeq() = default;
    explicit CumulantSeq(std::vector<double> c) : C(std::move(c)) {
        if (C.empty()) throw std::invalid_argument("CumulantSeq: order must be >= 1");
    }
    int order() const { return static_cast<int>(C.size()); }
    double operator[](int n) const { return C[static_cast<size_t>(n) - 1]; }  // 1-based
};

namespace detail {

template <class S>
series::TruncatedSeries<S> moment_series(const std::vector<S>& m) {
    const int K = static_cast<int>(m.size());
    series::TruncatedSeries<S> M(K);
    M[0] = S(1);
    for (int j = 1; j <= K; ++j) M[j] = m[static_cast<size_t>(j) - 1];
    return M;
}

}  // namespace detail

/// Moments -> free cumulants by coefficient matching in the defining
/// equation of the K-transform, 1 + sum_n C_n (u M(u))^n = M(u) with
/// M(u) = 1 + sum m_j u^j: peel C_k off the u^k coefficient.
template <class S>
std::vector<S> moments_to_cumulants(const std::vector<S>& m) {
    const int K = static_cast<int>(m.size());
    if (K < 1) throw std::invalid_argument("moments_to_cumulants: order must be >= 1");
    const auto M = detail::moment_series(m);
    std::vector<series::TruncatedSeries<S>> pow;  // pow[n] = M^{n+1}
    pow.push_back(M);
    for (int n = 2; n <= K; ++n) pow.push_back(series::ser_mul(pow.back(), M));
    std::vector<S> C(static_cast<size_t>(K), S(0));
    for (int k = 1; k <= K; ++k) {
        S acc = m[static_cast<size_t>(k) - 1];
        for (int n = 1; n < k; ++n) acc -= C[static_cast<size_t>(n) - 1] * pow[static_cast<size_t>(n) - 1][k - n];
        C[static_cast<size_t>(k) - 1] = acc;
    }
    return C;
}

/// Free cumulants -> moments: m_k = sum_{n<=k} C_n [u^{k-n}] M(u)^n, built
/// degree by degree (the needed coefficients of M^n only involve lower
/// moments). Inverse of moments_to_cumulants by construction.
template <class S>
std::vector<S> cumulants_to_moments(const std::vector<S>& C) {
    const int K = static_cast<int>(C.size());
    if (K < 1) throw std::invalid_argument("cumulants_to_moments: order must be >= 1");
    std::vector<S> m(static_cast<size_t>(K), S(0));
    for (int k = 1; k <= K; ++k) {
        series::TruncatedSeries<S> M(k - 1);
        M[0] = S(1);
        for (int j = 1; j < k; ++j) M[j] = m[static_cast<size_t>(j) - 1];
        series::TruncatedSeries<S> P = series::ser_constant(S(1), k - 1);
        S acc = S(0);
        for (int n = 1; n <= k; ++n) {
            P = series::ser_mul(P, M);  // P = M^n truncated at order k-1
            acc += C[static_cast<size_t>(n) - 1] * P[k - n];
        }
        m[static_cast<size_t>(k) - 1] = acc;
    }
    return m;
}

/// Moments -> cumulants by stripping non-crossing partition sums: C_n is the
/// defect of m_n against all proper partitions, m_n - sum_{pi != 1_n}
/// prod_V C_{|V|}. Needs NC enumeration, so capped at K <= 12.
template <class S>
std::vector<S> moments_to_cumulants_nc(const std::vector<S>& m) {
    const int K = static_cast<int>(m.size());
    if (K > 12) throw std::out_of_range("moments_to_cumulants_nc: order capped at 12");
    std::vector<S> C(static_cast<size_t>(K), S(0));
    for (int n = 1; n <= K; ++n) {
        const auto idx = ncpart::enumerate_nc(n);
        S acc = m[static_cast<size_t>(n) - 1];
        for (const auto& p : idx.partitions) {
            if (p.blocks.size() == 1) continue;  // the top partition carries C_n itself
            S term = S(1);
            for (const auto& v : p.blocks) term *= C[v.size() - 1];
            acc -= term;
        }
        C[static_cast<size_t>(n) - 1] = acc;
    }
    return C;
}

/// Moments -> cumulants through the Moebius function of NC(n):
/// C_n = sum_{pi} mu(pi, 1_n) prod_V m_{|V|}. K <= 12 (full enumeration).
template <class S>
std::vector<S> moments_to_cumulants_moebius(const std::vector<S>& m) {
    const int K = static_cast<int>(m.size());
    if (K > 12) throw std::out_of_range("moments_to_cumulants_moebius: order capped at 12");
    std::vector<S> C(static_cast<size_t>(K), S(0));
    for (int n = 1; n <= K; ++n) {
        const auto idx = ncpart::enumerate_nc(n);
        S acc = S(0);
        for (const auto& p : idx.partitions) {
            S term = S(ncpart::moebius_to_top(p));
            for (const auto& v : p.blocks) term *= m[v.size() - 1];
            acc += term;
        }
        C[static_cast<size_t>(n) - 1] = acc;
    }
    return C;
}

enum class Route { series, nc, moebius };

inline CumulantSeq m2c(const measures::MomentSeq& m, Route route = Route::series) {
    switch (route) {
        case Route::series: return CumulantSeq(moments_to_cumulants(m.m));
        case Route::nc: return CumulantSeq(moments_to_cumulants_nc(m.m));
        case Route::moebius: return CumulantSeq(moments_to_cumulants_moebius(m.m));
    }
    throw std::logic_error("m2c: unknown route");
}

inline measures::MomentSeq c2m(const CumulantSeq& c) {
    return measures::MomentSeq(cumulants_to_moments(c.C));
}

/// Free additive convolution on truncated moments: cumulants add.
inline measures::MomentSeq free_add_convolve(const measures::MomentSeq& a, const measures::MomentSeq& b) {
    if (a.order() != b.order()) throw std::invalid_argument("free_add_convolve: order mismatch");
    auto ca = moments_to_cumulants(a.m);
    const auto cb = moments_to_cumulants(b.m);
    for (size_t i = 0; i < ca.size(); ++i) ca[i] += cb[i];
    return measures::MomentSeq(cumulants_to_moments(ca));
}

/// t-fold free convolution power on cumulants: C_n -> t C_n. Defined for
/// real t >= 1 and for integers t >= 0; fractional t below 1 belongs to
/// compress(), where infeasibility is data rather than an error.
inline CumulantSeq free_power(const CumulantSeq& c, double t) {
    const bool integral = t == std::floor(t);
    if (!(t >= 1.0 || (integral && t >= 0.0)))
        throw std::domain_error("free_power: t must be >= 1 or a nonnegative integer");
    std::vector<double> out = c.C;
    for (double& v : out) v *= t;
    return CumulantSeq(std::move(out));
}

struct CompressResult {
    CumulantSeq cumulants;        // t * C_n
    measures::MomentSeq moments;  // induced moments
    measures::HankelReport hankel;
    bool feasible = false;
};

/// Scale cumulants by t > 0 and report whether the induced moment sequence
/// is still a genuine moment sequence (Hankel PSD). Always feasible for
/// t >= 1; may fail below 1 (Bernoulli does, for 0 < t < 1).
inline CompressResult compress(const CumulantSeq& c, double t) {
    if (!(t > 0)) throw std::domain_error("compress: t must be positive");
    std::vector<double> scaled = c.C;
    for (double& v : scaled) v *= t;
    CompressResult r;
    r.cumulants = CumulantSeq(scaled);
    r.moments = measures::MomentSeq(cumulants_to_moments(scaled));
    r.hankel = measures::hankel_psd(r.moments);
    r.feasible = r.hankel.psd;
    return r;
}

/// Word in a family of free variables, e.g. "XYXY".
struct FreeWord {
    std::string letters;
    explicit FreeWord(std::string s) : letters(std::move(s)) {
        if (letters.empty()) throw std::invalid_argument("FreeWord: empty word");
    }
    int length() const { return static_cast<int>(letters.size()); }
};

/// Marginal free cumulants of each variable, keyed by letter.
struct FreeFamilySpec {
    std::map<char, CumulantSeq> marginals;

    const CumulantSeq& of(char label) const {
        auto it = marginals.find(label);
        if (it == marginals.end())
            throw std::invalid_argument(std::string("FreeFamilySpec: unknown label '") + label + "'");
        return it->second;
    }
};

/// Mixed moment of a word in free variables: only non-crossing partitions
/// whose blocks are monochromatic in the word's letters contribute, each by
/// the product of the block-size cumulants of its letter.
inline double mixed_moment(const FreeFamilySpec& fam, const FreeWord& w) {
    const int n = w.length();
    if (n > 12) throw std::out_of_range("mixed_moment: word length capped at 12");
    for (char ch : w.letters) {
        if (fam.of(ch).order() < n)
            throw std::invalid_argument("mixed_moment: marginal cumulant order shorter than the word");
    }
    const auto idx = ncpart::enumerate_nc(n);
    double acc = 0;
    for (const auto& p : idx.partitions) {
        double term = 1;
        bool mono = true;
        for (const auto& v : p.blocks) {
            const char label = w.letters[static_cast<size_t>(v.front() - 1)];
            for (int e : v)
                if (w.letters[static_cast<size_t>(e - 1)] != label) {
                    mono = false;
                    break;
                }
            if (!mono) break;
            term *= fam.of(label)[static_cast<int>(v.size())];
        }
        if (mono) acc += term;
    }
    return acc;
}

}  // namespace freeconv::cumulants
