#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "freeconv/cumulants.hpp"
#include "freeconv/measures.hpp"
#include "freeconv/series.hpp"

// Closed-form parametric families on the line and on the unit circle:
// R-transforms, densities, moments, and the multiplicative Sigma-transform
// calculus for measures on T.

namespace freeconv::families {

using Complex = std::complex<double>;

/// Finite positive measure with finitely many atoms (weights need not sum
/// to 1); the generator measure of the Levy-Khintchine representations.
struct FiniteMeasure {
    std::vector<std::pair<double, double>> atoms;  // (location, weight)

    FiniteMeasure() = default;
    explicit FiniteMeasure(std::vector<std::pair<double, double>> a) : atoms(std::move(a)) {
        for (const auto& [x, w] : atoms) {
            (void)x;
            if (!(w > 0)) throw std::invalid_argument("FiniteMeasure: weights must be positive");
        }
    }
    double total() const {
        double t = 0;
        for (const auto& [x, w] : atoms) t += w;
        return t;
    }
};

struct Semicircle {
    double sigma = 1.0;  // variance
};
struct Arcsine {
    double a = 0.0, b = 2.0;
};
struct Bernoulli {  // (1-p) delta_{x0} + p delta_{x1}
    double p = 0.5, x0 = 0.0, x1 = 1.0;
};
struct Dirac {
    double a = 0.0;
};
struct Cauchy {
    double loc = 0.0, scale = 1.0;
};
/// The three-case list of standard free stable laws. Cases 1 and 3 share the
/// form R(z) = e^{i pi theta} z^{alpha-1}; case 2 is R(z) = a + b log z.
struct FreeStable {
    int stable_case = 1;
    double alpha = 2.0;
    double theta = 0.0;
    Complex a = {0.0, 0.0};
    double b = 0.0;
};
/// Freely infinitely divisible law with R(z) = alpha + int (z+t)/(1-tz) dnu(t).
struct FreeLK {
    double alpha = 0.0;
    FiniteMeasure nu;
};
enum class FreePoissonVariant {
    paper_r,         // printed R-transform lambda (z+t)/(1-tz)
    binomial_limit,  // limit of the free binomials, cumulants lambda t^n
};
struct FreePoisson {
    double lambda = 1.0, t = 1.0;
    FreePoissonVariant variant = FreePoissonVariant::paper_r;
};
struct FreeBinomial {  // ((1-lambda/n) delta_0 + (lambda/n) delta_t)^{boxplus n}
    long long n = 1;
    double lambda = 0.5, t = 1.0;
};

using FamilySpec =
    std::variant<Semicircle, Arcsine, Bernoulli, Dirac, Cauchy, FreeStable, FreeLK, FreePoisson, FreeBinomial>;

inline void validate(const FamilySpec& spec) {
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        if (!(s->sigma > 0)) throw std::invalid_argument("semicircle: sigma must be positive");
    } else if (const auto* a = std::get_if<Arcsine>(&spec)) {
        if (!(a->a < a->b)) throw std::invalid_argument("arcsine: need a < b");
    } else if (const auto* be = std::get_if<Bernoulli>(&spec)) {
        if (!(be->p > 0 && be->p < 1)) throw std::invalid_argument("bernoulli: p must be in (0,1)");
        if (!(be->x0 < be->x1)) throw std::invalid_argument("bernoulli: need x0 < x1");
    } else if (const auto* c = std::get_if<Cauchy>(&spec)) {
        if (!(c->scale > 0)) throw std::invalid_argument("cauchy: scale must be positive");
    } else if (const auto* st = std::get_if<FreeStable>(&spec)) {
        switch (st->stable_case) {
            case 1:
                if (!(st->alpha > 1 && st->alpha <= 2))
                    throw std::invalid_argument("free_stable case 1: need 1 < alpha <= 2");
                if (!(st->theta >= st->alpha - 2 && st->theta <= 0))
                    throw std::invalid_argument("free_stable case 1: need alpha-2 <= theta <= 0");
                break;
            case 2:
                if (st->a.imag() < 0)
                    throw std::invalid_argument("free_stable case 2: need a in the closed upper half-plane");
                if (!(st->b >= -st->a.imag() / std::numbers::pi))
                    throw std::invalid_argument("free_stable case 2: need b >= -Im(a)/pi");
                break;
            case 3:
                if (!(st->alpha > 0 && st->alpha < 1))
                    throw std::invalid_argument("free_stable case 3: need 0 < alpha < 1");
                if (!(st->theta >= 1 && st->theta <= 1 + st->alpha))
                    throw std::invalid_argument("free_stable case 3: need 1 <= theta <= 1+alpha");
                break;
            default: throw std::invalid_argument("free_stable: case must be 1, 2 or 3");
        }
    } else if (const auto* fp = std::get_if<FreePoisson>(&spec)) {
        if (!(fp->lambda > 0)) throw std::invalid_argument("free_poisson: lambda must be positive");
    } else if (const auto* fb = std::get_if<FreeBinomial>(&spec)) {
        if (fb->n < 1) throw std::invalid_argument("free_binomial: n must be >= 1");
        if (!(fb->lambda > 0 && fb->lambda < static_cast<double>(fb->n)))
            throw std::invalid_argument("free_binomial: need 0 < lambda < n");
    }
}

namespace detail {

// principal-branch product sqrt((z-a)(z-b)) that behaves like z at infinity
inline Complex branch_sqrt_prod(Complex z, double a, double b) {
    return std::sqrt(z - a) * std::sqrt(z - b);
}

inline Complex bernoulli_K(const Bernoulli& be, Complex z) {
    // w solves z w^2 - (z(x0+x1)+1) w + (z x0 x1 + (1-p)x1 + p x0) = 0,
    // branch with K(z) ~ 1/z + m1 near 0
    const Complex s = z * (be.x0 + be.x1) + 1.0;
    const Complex q = z * (be.x0 * be.x1) + (1.0 - be.p) * be.x1 + be.p * be.x0;
    const Complex d = std::sqrt(s * s - 4.0 * z * q);
    return (s + d) / (2.0 * z);
}

inline double arcsine_half_width(const Arcsine& a) { return 0.5 * (a.b - a.a); }

// R of the arcsine law on [0,2]: doubling the fair-Bernoulli R-transform
inline Complex arcsine_base_R(Complex z) { return 1.0 + (std::sqrt(1.0 + z * z) - 1.0) / z; }

}  // namespace detail

/// Closed-form R-transform value.
inline Complex family_R(const FamilySpec& spec, Complex z) {
    validate(spec);
    if (const auto* s = std::get_if<Semicircle>(&spec)) return s->sigma * z;
    if (const auto* a = std::get_if<Arcsine>(&spec)) {
        const double sc = detail::arcsine_half_width(*a);
        return sc * detail::arcsine_base_R(sc * z) + a->a;
    }
    if (const auto* be = std::get_if<Bernoulli>(&spec)) return detail::bernoulli_K(*be, z) - 1.0 / z;
    if (const auto* d = std::get_if<Dirac>(&spec)) return Complex(d->a, 0.0);
    if (const auto* c = std::get_if<Cauchy>(&spec)) {
        // constant on each half-plane; the Theta-cone (Im z < 0) branch pairs
        // with G on the upper half-plane
        const double sgn = z.imag() > 0 ? 1.0 : -1.0;
        return Complex(c->loc, sgn * c->scale);
    }
    if (const auto* st = std::get_if<FreeStable>(&spec)) {
        if (st->stable_case == 2) return st->a + st->b * std::log(z);
        const Complex phase = std::polar(1.0, std::numbers::pi * st->theta);
        return phase * std::pow(z, st->alpha - 1.0);
    }
    if (const auto* lk = std::get_if<FreeLK>(&spec)) {
        Complex acc(lk->alpha, 0.0);
        for (const auto& [t, w] : lk->nu.atoms) {
            const Complex den = 1.0 - t * z;
            if (std::abs(den) < 1e-14) throw std::domain_error("family_R: z at a pole of the generator");
            acc += w * (z + t) / den;
        }
        return acc;
    }
    if (const auto* fp = std::get_if<FreePoisson>(&spec)) {
        const Complex den = 1.0 - fp->t * z;
        if (std::abs(den) < 1e-14) throw std::domain_error("family_R: z at a pole of the generator");
        if (fp->variant == FreePoissonVariant::paper_r) return fp->lambda * (z + fp->t) / den;
        return fp->lambda * fp->t / den;
    }
    if (const auto* fb = std::get_if<FreeBinomial>(&spec)) {
        const Bernoulli base{fb->lambda / static_cast<double>(fb->n), 0.0, fb->t};
        return static_cast<double>(fb->n) * (detail::bernoulli_K(base, z) - 1.0 / z);
    }
    throw std::logic_error("family_R: unhandled family");
}

/// Closed-form density, defined for semicircle, arcsine and Cauchy only.
inline double family_density(const FamilySpec& spec, double x) {
    validate(spec);
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        const double r2 = 4.0 * s->sigma - x * x;
        return r2 > 0 ? std::sqrt(r2) / (2.0 * std::numbers::pi * s->sigma) : 0.0;
    }
    if (const auto* a = std::get_if<Arcsine>(&spec)) {
        const double q = (x - a->a) * (a->b - x);
        return q > 0 ? 1.0 / (std::numbers::pi * std::sqrt(q)) : 0.0;
    }
    if (const auto* c = std::get_if<Cauchy>(&spec)) {
        const double d = x - c->loc;
        return c->scale / (std::numbers::pi * (d * d + c->scale * c->scale));
    }
    throw std::domain_error("family_density: no closed-form density for this family");
}

/// Free cumulants C_1..C_K of the family, read off the R-transform series.
inline std::vector<double> family_cumulants(const FamilySpec& spec, int K) {
    validate(spec);
    if (K < 1) throw std::invalid_argument("family_cumulants: order must be >= 1");
    std::vector<double> C(static_cast<size_t>(K), 0.0);
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        if (K >= 2) C[1] = s->sigma;
        return C;
    }
    if (const auto* a = std::get_if<Arcsine>(&spec)) {
        // scaled/shifted image of the arcsine on [0,2], which doubles the
        // fair-Bernoulli cumulants
        std::vector<double> half(static_cast<size_t>(K), 0.5);
        auto base = cumulants::moments_to_cumulants(half);
        for (double& c : base) c *= 2.0;
        const double sc = detail::arcsine_half_width(*a);
        double pw = 1.0;
        for (int n = 1; n <= K; ++n) {
            pw *= sc;
            C[static_cast<size_t>(n) - 1] = pw * base[static_cast<size_t>(n) - 1];
        }
        C[0] += a->a;
        return C;
    }
    if (const auto* be = std::get_if<Bernoulli>(&spec)) {
        std::vector<double> m(static_cast<size_t>(K));
        for (int n = 1; n <= K; ++n)
            m[static_cast<size_t>(n) - 1] = (1.0 - be->p) * std::pow(be->x0, n) + be->p * std::pow(be->x1, n);
        return cumulants::moments_to_cumulants(m);
    }
    if (const auto* d = std::get_if<Dirac>(&spec)) {
        C[0] = d->a;
        return C;
    }
    if (std::get_if<Cauchy>(&spec))
        throw std::domain_error("family_cumulants: the Cauchy family has no moments");
    if (const auto* st = std::get_if<FreeStable>(&spec)) {
        if (st->stable_case == 1 && st->alpha == 2.0) {
            if (K >= 2) C[1] = 1.0;  // R(z) = z
            return C;
        }
        throw std::domain_error("family_cumulants: free stable laws with alpha < 2 are heavy-tailed");
    }
    if (const auto* lk = std::get_if<FreeLK>(&spec)) {
        C[0] = lk->alpha;
        for (const auto& [t, w] : lk->nu.atoms) {
            C[0] += w * t;
            double pw = 1.0;  // t^{n-2}
            for (int n = 2; n <= K; ++n) {
                C[static_cast<size_t>(n) - 1] += w * pw * (1.0 + t * t);
                pw *= t;
            }
        }
        return C;
    }
    if (const auto* fp = std::get_if<FreePoisson>(&spec)) {
        if (fp->variant == FreePoissonVariant::paper_r) {
            C[0] = fp->lambda * fp->t;
            double pw = 1.0;
            for (int n = 2; n <= K; ++n) {
                C[static_cast<size_t>(n) - 1] = fp->lambda * pw * (1.0 + fp->t * fp->t);
                pw *= fp->t;
            }
        } else {
            double pw = 1.0;
            for (int n = 1; n <= K; ++n) {
                pw *= fp->t;
                C[static_cast<size_t>(n) - 1] = fp->lambda * pw;
            }
        }
        return C;
    }
    if (const auto* fb = std::get_if<FreeBinomial>(&spec)) {
        const double p = fb->lambda / static_cast<double>(fb->n);
        std::vector<double> m(static_cast<size_t>(K));
        for (int n = 1; n <= K; ++n) m[static_cast<size_t>(n) - 1] = p * std::pow(fb->t, n);
        auto base = cumulants::moments_to_cumulants(m);
        for (double& c : base) c *= static_cast<double>(fb->n);
        return base;
    }
    throw std::logic_error("family_cumulants: unhandled family");
}

/// Moment sequence to order K; rejects heavy-tailed families.
inline measures::MomentSeq family_moments(const FamilySpec& spec, int K) {
    return measures::MomentSeq(cumulants::cumulants_to_moments(family_cumulants(spec, K)));
}

/// Support interval (infinite for Cauchy); used by the analytic layer.
inline std::pair<double, double> family_support(const FamilySpec& spec) {
    validate(spec);
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        const double r = 2.0 * std::sqrt(s->sigma);
        return {-r, r};
    }
    if (const auto* a = std::get_if<Arcsine>(&spec)) return {a->a, a->b};
    if (const auto* be = std::get_if<Bernoulli>(&spec)) return {be->x0, be->x1};
    if (const auto* d = std::get_if<Dirac>(&spec)) return {d->a, d->a};
    if (std::get_if<Cauchy>(&spec))
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    throw std::domain_error("family_support: unavailable for this family");
}

/// Closed-form Cauchy transform; available for semicircle, arcsine, Cauchy,
/// Bernoulli and Dirac.
inline Complex family_G(const FamilySpec& spec, Complex zeta) {
    validate(spec);
    if (std::abs(zeta.imag()) == 0.0) throw std::domain_error("family_G: zeta must be off the real axis");
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        const double r = 2.0 * std::sqrt(s->sigma);
        return (zeta - detail::branch_sqrt_prod(zeta, -r, r)) / (2.0 * s->sigma);
    }
    if (const auto* a = std::get_if<Arcsine>(&spec)) return 1.0 / detail::branch_sqrt_prod(zeta, a->a, a->b);
    if (const auto* be = std::get_if<Bernoulli>(&spec))
        return (1.0 - be->p) / (zeta - be->x0) + be->p / (zeta - be->x1);
    if (const auto* d = std::get_if<Dirac>(&spec)) return 1.0 / (zeta - d->a);
    if (const auto* c = std::get_if<Cauchy>(&spec)) {
        const double sgn = zeta.imag() > 0 ? 1.0 : -1.0;
        return 1.0 / (zeta - c->loc + Complex(0.0, sgn * c->scale));
    }
    throw std::domain_error("family_G: no closed-form Cauchy transform for this family");
}

inline bool family_has_G(const FamilySpec& spec) {
    return std::holds_alternative<Semicircle>(spec) || std::holds_alternative<Arcsine>(spec) ||
           std::holds_alternative<Bernoulli>(spec) || std::holds_alternative<Dirac>(spec) ||
           std::holds_alternative<Cauchy>(spec);
}

/// Closed-form K-transform (right inverse of G) where available.
inline Complex family_K(const FamilySpec& spec, Complex z) {
    validate(spec);
    if (const auto* s = std::get_if<Semicircle>(&spec)) return 1.0 / z + s->sigma * z;
    if (std::holds_alternative<Arcsine>(spec) || std::holds_alternative<Cauchy>(spec) ||
        std::holds_alternative<Dirac>(spec))
        return family_R(spec, z) + 1.0 / z;
    if (const auto* be = std::get_if<Bernoulli>(&spec)) return detail::bernoulli_K(*be, z);
    throw std::domain_error("family_K: no closed-form K-transform for this family");
}

// ---------------------------------------------------------------------------
// Measures on the unit circle: psi / Sigma calculus and boxtimes.

/// psi_mu(z) = sum_{n>=1} m_n z^n as a truncated series.
inline series::TruncatedSeries<Complex> psi_series(const measures::CircleMomentSeq& m) {
    const int K = m.order();
    series::TruncatedSeries<Complex> psi(K);
    for (int n = 1; n <= K; ++n) psi[n] = m[n];
    return psi;
}

/// Sigma-transform coefficients to order K-1: Sigma(z) = chi(z)/z where chi
/// is the compositional inverse of psi/(1+psi). Requires m_1 != 0.
inline series::TruncatedSeries<Complex> sigma_series(const measures::CircleMomentSeq& m) {
    if (std::abs(m[1]) < 1e-13)
        throw std::domain_error("sigma_series: measure has zero mean (not in M_*)");
    const auto psi = psi_series(m);
    auto onepsi = psi;
    onepsi[0] += 1.0;
    const auto eta = series::ser_div(psi, onepsi);
    const auto chi = series::ser_reversion(eta);
    series::TruncatedSeries<Complex> sigma(m.order() - 1 >= 0 ? m.order() - 1 : 0);
    for (int k = 0; k < m.order(); ++k) sigma[k] = chi[k + 1];
    return sigma;
}

/// Free multiplicative convolution on truncated circle moments:
/// Sigma_{mu boxtimes nu} = Sigma_mu Sigma_nu, then walk the construction
/// backwards to recover moments.
inline measures::CircleMomentSeq mult_convolve(const measures::CircleMomentSeq& a,
                                               const measures::CircleMomentSeq& b, int K) {
    if (a.order() < K || b.order() < K)
        throw std::invalid_argument("mult_convolve: inputs shorter than requested order");
    auto trunc = [&](const measures::CircleMomentSeq& s) {
        std::vector<Complex> v(s.m.begin(), s.m.begin() + K);
        return measures::CircleMomentSeq(std::move(v));
    };
    const auto sa = sigma_series(trunc(a));
    const auto sb = sigma_series(trunc(b));
    const auto sc = series::ser_mul(sa, sb);
    series::TruncatedSeries<Complex> chi(K);  // chi(z) = z * Sigma(z)
    for (int k = 1; k <= K; ++k) chi[k] = sc[k - 1];
    const auto eta = series::ser_reversion(chi);
    auto denom = series::ser_scale(eta, Complex(-1.0, 0.0));
    denom[0] += 1.0;
    const auto psi = series::ser_div(eta, denom);
    std::vector<Complex> m(static_cast<size_t>(K));
    for (int n = 1; n <= K; ++n) m[static_cast<size_t>(n) - 1] = psi[n];
    return measures::CircleMomentSeq(std::move(m));
}

/// Atom on T at angle theta, or the multiplicative Levy-Khintchine family
/// Sigma(z) = exp(i alpha + int (1+zeta z)/(1-zeta z) dnu(zeta)).
struct CircleAtom {
    double theta = 0.0;
};
struct MultLK {
    double alpha = 0.0;
    FiniteMeasure nu;  // atoms (angle, weight) on T
};
using CircleFamilySpec = std::variant<CircleAtom, MultLK>;

inline measures::CircleMomentSeq circle_family_moments(const CircleFamilySpec& spec, int K) {
    if (const auto* at = std::get_if<CircleAtom>(&spec)) return measures::CircleMomentSeq::atom(at->theta, K);
    throw std::domain_error("circle_family_moments: only atoms have direct moments");
}

/// Sigma-transform of the multiplicative Levy-Khintchine family at z, |z|<1.
inline Complex mult_LK_sigma(const MultLK& spec, Complex z) {
    if (std::abs(z) >= 1.0) throw std::domain_error("mult_LK_sigma: need |z| < 1");
    Complex u(0.0, spec.alpha);
    for (const auto& [theta, w] : spec.nu.atoms) {
        const Complex xi = std::polar(1.0, theta);
        const Complex den = 1.0 - xi * z;
        if (std::abs(den) < 1e-14) throw std::domain_error("mult_LK_sigma: z at a generator singularity");
        u += w * (1.0 + xi * z) / den;
    }
    return std::exp(u);
}

// ---------------------------------------------------------------------------

/// The two printed descriptions of the free Poisson law disagree in the
/// second cumulant; both numbers are computed and reported side by side.
struct FreePoissonComparison {
    double lambda = 0, t = 0;
    long long n = 0;                  // free binomial resolution
    double c2_free_binomial = 0;      // C_2 of the n-fold free binomial
    double c2_binomial_limit = 0;     // its n -> infinity limit, lambda t^2
    double c2_paper_r = 0;            // z-coefficient of lambda (z+t)/(1-tz)
    double binomial_limit_rel_err = 0;  // |c2_free_binomial - lambda t^2| / lambda t^2
    double discrepancy = 0;           // c2_paper_r - c2_binomial_limit
};

inline FreePoissonComparison free_poisson_comparison(double lambda, double t, long long n = 10000) {
    FreePoissonComparison r;
    r.lambda = lambda;
    r.t = t;
    r.n = n;
    const auto C = family_cumulants(FreeBinomial{n, lambda, t}, 2);
    r.c2_free_binomial = C[1];
    r.c2_binomial_limit = lambda * t * t;
    r.c2_paper_r = lambda * (1.0 + t * t);
    r.binomial_limit_rel_err = std::abs(r.c2_free_binomial - r.c2_binomial_limit) / (lambda * t * t);
    r.discrepancy = r.c2_paper_r - r.c2_binomial_limit;
    return r;
}

}  // namespace freeconv::families
