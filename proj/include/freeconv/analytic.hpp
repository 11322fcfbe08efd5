#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include "freeconv/families.hpp"
#include "freeconv/measures.hpp"

// The analytic-function layer: Cauchy transforms over every measure
// representation, numeric K/R-transforms (inversion of G), free additive
// convolution by solving K_a(g) + K_b(g) - 1/g = zeta, density recovery by
// Stieltjes inversion, the subordination function F and the Markov
// transition kernel it induces.

namespace freeconv::analytic {

using Complex = std::complex<double>;

/// Truncated cone in the lower half-plane on which K/R evaluations are
/// accepted: |Re z| < alpha |Im z|, Im z < 0, |z| <= beta.
struct DomainParams {
    double alpha = 2.0;
    double beta = 0.75;

    bool contains(Complex z) const {
        return z.imag() < 0 && std::abs(z.real()) < alpha * std::abs(z.imag()) && std::abs(z) <= beta;
    }
};

struct ConvergenceError : std::runtime_error {
    Complex query;
    double residual;
    int iterations;
    ConvergenceError(const std::string& what, Complex q, double res, int it)
        : std::runtime_error(what + " (residual " + std::to_string(res) + " after " +
                             std::to_string(it) + " iterations)"),
          query(q), residual(res), iterations(it) {}
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 200;
};

/// A measure under any of the three concrete representations, with cached
/// support bounds.
struct MeasureHandle {
    std::variant<measures::AtomicMeasure, measures::GridDensity, families::FamilySpec> rep;
    double lo = 0, hi = 0;

    static MeasureHandle atomic(measures::AtomicMeasure a) {
        MeasureHandle h;
        h.lo = a.min_support();
        h.hi = a.max_support();
        h.rep = std::move(a);
        return h;
    }
    static MeasureHandle grid(measures::GridDensity g) {
        MeasureHandle h;
        h.lo = g.min_support();
        h.hi = g.max_support();
        h.rep = std::move(g);
        return h;
    }
    static MeasureHandle family(families::FamilySpec f) {
        MeasureHandle h;
        auto [lo, hi] = families::family_support(f);
        h.lo = lo;
        h.hi = hi;
        h.rep = std::move(f);
        return h;
    }

    /// first moment, used to seed Newton iterations (Cauchy: the center)
    double center() const {
        if (const auto* a = std::get_if<measures::AtomicMeasure>(&rep))
            return measures::moments_of(*a, 1)[1];
        if (const auto* g = std::get_if<measures::GridDensity>(&rep))
            return measures::moments_of(*g, 1)[1];
        const auto& f = std::get<families::FamilySpec>(rep);
        if (const auto* c = std::get_if<families::Cauchy>(&f)) return c->loc;
        return families::family_moments(f, 1)[1];
    }

    bool has_closed_K() const {
        const auto* f = std::get_if<families::FamilySpec>(&rep);
        return f && families::family_has_G(*f);
    }
};

/// G_mu(zeta) = int (zeta - t)^{-1} dmu(t); exact sum for atoms, trapezoid
/// quadrature for grids, closed forms for families.
inline Complex cauchy_G(const MeasureHandle& h, Complex zeta) {
    if (zeta.imag() == 0.0) throw std::domain_error("cauchy_G: zeta must be off the real axis");
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&h.rep)) {
        Complex acc = 0;
        for (const auto& [x, w] : a->atoms) acc += w / (zeta - x);
        return acc;
    }
    if (const auto* g = std::get_if<measures::GridDensity>(&h.rep)) {
        Complex acc = 0;
        for (size_t i = 0; i < g->ps.size(); ++i) {
            const double cw = (i == 0 || i + 1 == g->ps.size()) ? 0.5 : 1.0;
            acc += cw * g->step * g->ps[i] / (zeta - g->x_at(i));
        }
        return acc;
    }
    return families::family_G(std::get<families::FamilySpec>(h.rep), zeta);
}

namespace detail {

inline Complex G_prime(const MeasureHandle& h, Complex zeta) {
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&h.rep)) {
        Complex acc = 0;
        for (const auto& [x, w] : a->atoms) {
            const Complex d = zeta - x;
            acc -= w / (d * d);
        }
        return acc;
    }
    if (const auto* g = std::get_if<measures::GridDensity>(&h.rep)) {
        Complex acc = 0;
        for (size_t i = 0; i < g->ps.size(); ++i) {
            const double cw = (i == 0 || i + 1 == g->ps.size()) ? 0.5 : 1.0;
            const Complex d = zeta - g->x_at(i);
            acc -= cw * g->step * g->ps[i] / (d * d);
        }
        return acc;
    }
    const auto& f = std::get<families::FamilySpec>(h.rep);
    if (const auto* s = std::get_if<families::Semicircle>(&f)) {
        const double r = 2.0 * std::sqrt(s->sigma);
        const Complex sq = families::detail::branch_sqrt_prod(zeta, -r, r);
        return (1.0 - zeta / sq) / (2.0 * s->sigma);
    }
    if (const auto* a = std::get_if<families::Arcsine>(&f)) {
        const Complex sq = families::detail::branch_sqrt_prod(zeta, a->a, a->b);
        return -(2.0 * zeta - a->a - a->b) / (2.0 * sq * sq * sq);
    }
    if (const auto* be = std::get_if<families::Bernoulli>(&f)) {
        const Complex d0 = zeta - be->x0, d1 = zeta - be->x1;
        return -(1.0 - be->p) / (d0 * d0) - be->p / (d1 * d1);
    }
    if (const auto* d = std::get_if<families::Dirac>(&f)) {
        const Complex dd = zeta - d->a;
        return -1.0 / (dd * dd);
    }
    if (const auto* c = std::get_if<families::Cauchy>(&f)) {
        const double sgn = zeta.imag() > 0 ? 1.0 : -1.0;
        const Complex d = zeta - c->loc + Complex(0.0, sgn * c->scale);
        return -1.0 / (d * d);
    }
    throw std::domain_error("cauchy_G: no derivative for this family");
}

/// Damped Newton solve of G(w) = z from the start value w0. Unchecked
/// domain-wise; the public k_eval applies the cone policy.
inline Complex invert_G(const MeasureHandle& h, Complex z, Complex w0, const SolveOptions& opt,
                        int* iterations_out = nullptr) {
    Complex w = w0;
    Complex r = cauchy_G(h, w) - z;
    int it = 0;
    for (; it < opt.max_iter && std::abs(r) > opt.tol; ++it) {
        const Complex gp = G_prime(h, w);
        if (std::abs(gp) < 1e-300)
            throw ConvergenceError("invert_G: derivative vanished", z, std::abs(r), it);
        const Complex step = r / gp;
        double lambda = 1.0;
        Complex w_next = w - step;
        Complex r_next = cauchy_G(h, w_next) - z;
        int backtracks = 0;
        while (std::abs(r_next) >= std::abs(r) && backtracks < 60) {
            lambda *= 0.5;
            w_next = w - lambda * step;
            r_next = cauchy_G(h, w_next) - z;
            ++backtracks;
        }
        if (std::abs(r_next) >= std::abs(r))
            throw ConvergenceError("invert_G: stalled", z, std::abs(r), it);
        w = w_next;
        r = r_next;
    }
    if (iterations_out) *iterations_out += it;
    if (std::abs(r) > opt.tol) throw ConvergenceError("invert_G: no convergence", z, std::abs(r), it);
    return w;
}

/// K(z) with a caller-provided warm start. Always Newton inversion of G:
/// the warm start is what keeps the iterate on the branch continued from
/// high altitude, where closed-form principal-branch expressions would jump.
inline Complex K_value(const MeasureHandle& h, Complex z, Complex w_guess, const SolveOptions& opt,
                       int* iterations_out = nullptr) {
    return invert_G(h, z, w_guess, opt, iterations_out);
}

inline Complex K_prime(const MeasureHandle& h, Complex z, Complex w_at_z) {
    (void)z;
    return 1.0 / G_prime(h, w_at_z);  // inverse function derivative
}

}  // namespace detail

/// K_mu(z): the right inverse of G_mu, evaluated on the trusted cone in the
/// lower half-plane and selected on the branch with K(z) ~ 1/z + m_1.
inline Complex k_eval(const MeasureHandle& h, Complex z, const DomainParams& dom = {},
                      const SolveOptions& opt = {}) {
    if (!dom.contains(z))
        throw std::domain_error("k_eval: z outside the trusted cone of the lower half-plane");
    const Complex w0 = 1.0 / z + h.center();
    return detail::invert_G(h, z, w0, opt);
}

/// R_mu(z) = K_mu(z) - 1/z.
inline Complex r_eval(const MeasureHandle& h, Complex z, const DomainParams& dom = {},
                      const SolveOptions& opt = {}) {
    return k_eval(h, z, dom, opt) - 1.0 / z;
}

struct ConvGResult {
    Complex g;            // G_{a boxplus b}(zeta)
    Complex w_a, w_b;     // K_a(g), K_b(g): the subordination points
    double residual = 0;  // |K_a(g) + K_b(g) - 1/g - zeta|
    int iterations = 0;
};

namespace detail {

inline double im_floor() { return 1e-4; }

// One damped Newton solve of K_a(g) + K_b(g) - 1/g = zeta at fixed zeta,
// warm-started from (g, w_a, w_b).
inline void conv_newton_level(const MeasureHandle& a, const MeasureHandle& b, Complex zeta, Complex& g,
                              Complex& w_a, Complex& w_b, const SolveOptions& opt, int& iterations) {
    SolveOptions inner{std::min(1e-13, opt.tol * 0.01), opt.max_iter};
    auto phi = [&](Complex gg, Complex& wa, Complex& wb) {
        wa = K_value(a, gg, wa, inner, &iterations);
        wb = K_value(b, gg, wb, inner, &iterations);
        return wa + wb - 1.0 / gg - zeta;
    };
    Complex r = phi(g, w_a, w_b);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (std::abs(r) <= opt.tol) return;
        ++iterations;
        const Complex dphi = K_prime(a, g, w_a) + K_prime(b, g, w_b) + 1.0 / (g * g);
        if (std::abs(dphi) < 1e-300) throw ConvergenceError("conv_G: flat objective", zeta, std::abs(r), it);
        const Complex step = r / dphi;
        double lambda = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            const Complex g_next = g - lambda * step;
            if (g_next.imag() < 0) {  // stay on the physical branch
                Complex wa = w_a, wb = w_b;
                Complex r_next;
                bool ok = true;
                try {
                    r_next = phi(g_next, wa, wb);
                } catch (const ConvergenceError&) {
                    ok = false;
                }
                if (ok && std::abs(r_next) < std::abs(r)) {
                    g = g_next;
                    w_a = wa;
                    w_b = wb;
                    r = r_next;
                    lambda = -1;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (lambda > 0) throw ConvergenceError("conv_G: line search stalled", zeta, std::abs(r), it);
    }
    if (std::abs(r) > opt.tol)
        throw ConvergenceError("conv_G: no convergence", zeta, std::abs(r), opt.max_iter);
}

}  // namespace detail

/// G_{a boxplus b}(zeta) for Im zeta above the numeric floor, by damped
/// Newton on g with continuation from high altitude (start at
/// Re zeta + 10i where g ~ 1/zeta, then walk Im zeta down); the walk keeps
/// iterates on the physical branch Im g < 0, g ~ 1/zeta.
inline ConvGResult conv_G_diag(const MeasureHandle& a, const MeasureHandle& b, Complex zeta,
                               const SolveOptions& opt = SolveOptions{1e-11, 400}) {
    if (zeta.imag() < detail::im_floor())
        throw std::domain_error("conv_G: Im zeta below the 1e-4 numeric floor");
    ConvGResult res;
    const double y_top = std::max(10.0, 2.0 * zeta.imag());
    Complex level(zeta.real(), y_top);
    res.g = 1.0 / level;
    res.w_a = 1.0 / res.g + a.center();
    res.w_b = 1.0 / res.g + b.center();
    while (true) {
        detail::conv_newton_level(a, b, level, res.g, res.w_a, res.w_b, opt, res.iterations);
        if (level == zeta) break;
        const double y_next = std::max(zeta.imag(), level.imag() * 0.55);
        level = Complex(zeta.real(), y_next);
    }
    res.residual = std::abs(res.w_a + res.w_b - 1.0 / res.g - zeta);
    return res;
}

inline Complex conv_G(const MeasureHandle& a, const MeasureHandle& b, Complex zeta,
                      const SolveOptions& opt = SolveOptions{1e-11, 400}) {
    return conv_G_diag(a, b, zeta, opt).g;
}

struct DensityRecovery {
    measures::GridDensity density;
    double mass_defect = 0;  // 1 - trapezoid mass before clipping adjustments
};

/// Recover a density from a Cauchy transform by Stieltjes inversion
/// p(x) = -(1/pi) Im G(x + i eps), extrapolated to eps = 0 through the
/// supplied decreasing schedule (polynomial extrapolation in eps) and
/// clipped at zero.
inline DensityRecovery stieltjes_density(const std::function<Complex(Complex)>& G, double x_lo, double x_hi,
                                         int nodes, std::vector<double> eps_schedule) {
    if (nodes < 2) throw std::invalid_argument("stieltjes_density: need at least two nodes");
    if (eps_schedule.empty()) throw std::invalid_argument("stieltjes_density: empty epsilon schedule");
    for (double e : eps_schedule)
        if (!(e >= 1e-6)) throw std::invalid_argument("stieltjes_density: epsilons must be >= 1e-6");
    const double step = (x_hi - x_lo) / static_cast<double>(nodes - 1);
    const size_t ne = eps_schedule.size();
    std::vector<double> ps(static_cast<size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        const double x = x_lo + step * i;
        std::vector<double> v(ne);
        for (size_t k = 0; k < ne; ++k)
            v[k] = -G(Complex(x, eps_schedule[k])).imag() / std::numbers::pi;
        // Neville extrapolation of the polynomial through (eps_k, v_k) to eps=0
        for (size_t m = 1; m < ne; ++m)
            for (size_t k = 0; k + m < ne; ++k)
                v[k] = (eps_schedule[k + m] * v[k] - eps_schedule[k] * v[k + 1]) /
                       (eps_schedule[k + m] - eps_schedule[k]);
        ps[static_cast<size_t>(i)] = std::max(0.0, v[0]);
    }
    double mass = 0;
    for (size_t i = 0; i + 1 < ps.size(); ++i) mass += 0.5 * (ps[i] + ps[i + 1]) * step;
    DensityRecovery out;
    out.mass_defect = 1.0 - mass;
    const double declared = std::max(0.01, std::abs(out.mass_defect) * 1.0001 + 1e-12);
    out.density = measures::GridDensity(x_lo, step, std::move(ps), declared);
    return out;
}

/// Default epsilon schedule {4h, 2h, h} with h twice the grid step.
inline std::vector<double> default_eps_schedule(double grid_step) {
    const double h = std::max(1e-6, 2.0 * grid_step);
    return {4.0 * h, 2.0 * h, h};
}

struct SubordinationResult {
    Complex zeta;
    Complex F;
    double residual = 0;  // |G_a(F) - G_{a boxplus b}(zeta)|
    int iterations = 0;
    bool branch_ambiguous = false;  // another root of G_a(w) = g also satisfies Im w >= Im zeta
};

namespace detail {

// all roots of G_a(w) = g for a purely atomic a, via the companion matrix of
// the numerator polynomial sum_i w_i prod_{j != i}(w - x_j) - g prod_j (w - x_j)
inline std::vector<Complex> atomic_G_level_set(const measures::AtomicMeasure& a, Complex g) {
    const size_t k = a.atoms.size();
    std::vector<Complex> full(1, Complex(1.0, 0.0));  // prod (w - x_j)
    for (const auto& [x, w] : a.atoms) {
        (void)w;
        std::vector<Complex> next(full.size() + 1, Complex(0.0, 0.0));
        for (size_t i = 0; i < full.size(); ++i) {
            next[i + 1] += full[i];
            next[i] -= x * full[i];
        }
        full = std::move(next);
    }
    std::vector<Complex> num(k + 1, Complex(0.0, 0.0));
    for (size_t i = 0; i <= k; ++i) num[i] = -g * full[i];
    for (size_t ai = 0; ai < k; ++ai) {
        // synthetic division of full by (w - x_ai)
        std::vector<Complex> q(k, Complex(0.0, 0.0));
        Complex carry = full[k];
        for (size_t j = k; j-- > 0;) {
            q[j] = carry;
            carry = full[j] + carry * a.atoms[ai].first;
        }
        for (size_t j = 0; j < k; ++j) num[j] += a.atoms[ai].second * q[j];
    }
    while (num.size() > 1 && std::abs(num.back()) < 1e-300) num.pop_back();
    const size_t deg = num.size() - 1;
    if (deg == 0) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg),
                                                        static_cast<Eigen::Index>(deg));
    for (size_t i = 1; i < deg; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (size_t i = 0; i < deg; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -num[i] / num[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    std::vector<Complex> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

}  // namespace detail

/// The subordination function F with G_a(F(zeta)) = G_{a boxplus b}(zeta):
/// F = K_a evaluated at the solved convolution transform. Reports residual,
/// iteration count, and a branch-ambiguity flag (checked against the full
/// level set when a is atomic with few atoms).
inline SubordinationResult subordination_F(const MeasureHandle& a, const MeasureHandle& b, Complex zeta,
                                           const SolveOptions& opt = SolveOptions{1e-12, 400}) {
    const auto conv = conv_G_diag(a, b, zeta, opt);
    SubordinationResult res;
    res.zeta = zeta;
    res.F = conv.w_a;
    res.iterations = conv.iterations;
    res.residual = std::abs(cauchy_G(a, res.F) - conv.g);
    if (const auto* at = std::get_if<measures::AtomicMeasure>(&a.rep)) {
        if (at->atoms.size() <= 12) {
            int candidates = 0;
            for (const Complex& w : detail::atomic_G_level_set(*at, conv.g))
                if (w.imag() >= zeta.imag() - 1e-9) ++candidates;
            res.branch_ambiguous = candidates > 1;
        }
    }
    return res;
}

/// Markov transition kernel k(x, du) of the boxplus disintegration,
/// recovered as a density on the grid from its Stieltjes transform
/// 1/(F(zeta) - x). x must lie in the support of a.
inline DensityRecovery markov_kernel_density(const MeasureHandle& a, const MeasureHandle& b, double x,
                                             double u_lo, double u_hi, int nodes,
                                             std::vector<double> eps_schedule,
                                             const SolveOptions& opt = SolveOptions{1e-12, 400}) {
    bool in_support = false;
    if (const auto* at = std::get_if<measures::AtomicMeasure>(&a.rep)) {
        for (const auto& [xa, w] : at->atoms) {
            (void)w;
            if (std::abs(xa - x) <= 1e-9) in_support = true;
        }
    } else {
        in_support = x >= a.lo - 1e-12 && x <= a.hi + 1e-12;
    }
    if (!in_support) throw std::domain_error("markov_kernel_density: x outside the support of a");
    auto Gx = [&](Complex zeta) { return 1.0 / (subordination_F(a, b, zeta, opt).F - x); };
    return stieltjes_density(Gx, u_lo, u_hi, nodes, std::move(eps_schedule));
}

}  // namespace freeconv::analytic
