#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freeconv/series.hpp"

// Concrete measure representations (atoms, sampled densities, truncated
// moment sequences) plus the classical-probability reference operations the
// random-matrix experiments are checked against.

namespace freeconv::measures {

/// Purely atomic probability measure. Atoms are merged (1e-9 location
/// tolerance) and sorted on construction; weights must be positive and sum
/// to 1 within 1e-12.
struct AtomicMeasure {
    std::vector<std::pair<double, double>> atoms;  // (location, weight), ascending

    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<std::pair<double, double>> raw) {
        if (raw.empty()) throw std::invalid_argument("AtomicMeasure: no atoms");
        std::sort(raw.begin(), raw.end());
        for (const auto& [x, w] : raw) {
            (void)x;
            if (!(w > 0)) throw std::invalid_argument("AtomicMeasure: weights must be positive");
        }
        double total = 0;
        for (const auto& [x, w] : raw) total += w;
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("AtomicMeasure: weights must sum to 1");
        for (const auto& [x, w] : raw) {
            if (!atoms.empty() && x - atoms.back().first <= 1e-9)
                atoms.back().second += w;
            else
                atoms.emplace_back(x, w);
        }
    }

    static AtomicMeasure dirac(double a) { return AtomicMeasure({{a, 1.0}}); }
    /// (1-p) delta_{x0} + p delta_{x1}
    static AtomicMeasure bernoulli(double p, double x0 = 0.0, double x1 = 1.0) {
        if (p <= 0.0) return dirac(x0);
        if (p >= 1.0) return dirac(x1);
        return AtomicMeasure({{x0, 1.0 - p}, {x1, p}});
    }

    double min_support() const { return atoms.front().first; }
    double max_support() const { return atoms.back().first; }

    bool operator==(const AtomicMeasure& o) const { return atoms == o.atoms; }
};

/// Density sampled on a uniform grid. Total trapezoid mass must be within
/// eps_mass of 1; recovered densities declare their measured defect.
struct GridDensity {
    double x0 = 0.0;
    double step = 0.0;
    std::vector<double> ps;
    double eps_mass = 0.01;

    GridDensity() = default;
    GridDensity(double x0_, double step_, std::vector<double> ps_, double eps_mass_ = 0.01)
        : x0(x0_), step(step_), ps(std::move(ps_)), eps_mass(eps_mass_) {
        if (ps.size() < 2) throw std::invalid_argument("GridDensity: need at least two nodes");
        if (!(step > 0)) throw std::invalid_argument("GridDensity: step must be positive");
        for (double p : ps)
            if (p < 0) throw std::invalid_argument("GridDensity: negative density value");
        const double m = mass();
        if (std::abs(m - 1.0) > eps_mass)
            throw std::invalid_argument("GridDensity: trapezoid mass " + std::to_string(m) +
                                        " outside declared tolerance");
    }

    size_t size() const { return ps.size(); }
    double x_at(size_t i) const { return x0 + step * static_cast<double>(i); }
    double min_support() const { return x0; }
    double max_support() const { return x_at(ps.size() - 1); }

    double mass() const {
        double m = 0;
        for (size_t i = 0; i + 1 < ps.size(); ++i) m += 0.5 * (ps[i] + ps[i + 1]) * step;
        return m;
    }
};

/// Truncated real moment sequence m_1..m_K (m_0 = 1 implicit).
struct MomentSeq {
    std::vector<double> m;

    MomentSeq() = default;
    explicit MomentSeq(std::vector<double> m_) : m(std::move(m_)) {
        if (m.empty()) throw std::invalid_argument("MomentSeq: order must be >= 1");
    }
    int order() const { return static_cast<int>(m.size()); }
    double operator[](int n) const {  // 1-based; [0] == 1
        if (n == 0) return 1.0;
        return m[static_cast<size_t>(n) - 1];
    }
};

/// Complex moments m_n = int xi^n dmu(xi) of a measure on the unit circle.
struct CircleMomentSeq {
    std::vector<std::complex<double>> m;

    CircleMomentSeq() = default;
    explicit CircleMomentSeq(std::vector<std::complex<double>> m_) : m(std::move(m_)) {
        if (m.empty()) throw std::invalid_argument("CircleMomentSeq: order must be >= 1");
        for (const auto& v : m)
            if (std::abs(v) > 1.0 + 1e-12)
                throw std::invalid_argument("CircleMomentSeq: |m_n| must be <= 1");
    }
    int order() const { return static_cast<int>(m.size()); }
    std::complex<double> operator[](int n) const {
        if (n == 0) return {1.0, 0.0};
        return m[static_cast<size_t>(n) - 1];
    }

    /// moments of a unit-modulus atom exp(i theta)
    static CircleMomentSeq atom(double theta, int K) {
        std::vector<std::complex<double>> m(static_cast<size_t>(K));
        for (int n = 1; n <= K; ++n) m[static_cast<size_t>(n) - 1] = std::polar(1.0, theta * n);
        return CircleMomentSeq(std::move(m));
    }
    /// moments of a finitely supported measure sum w_j delta_{exp(i theta_j)}
    static CircleMomentSeq from_atoms(const std::vector<std::pair<double, double>>& angle_weight, int K) {
        std::vector<std::complex<double>> m(static_cast<size_t>(K), {0.0, 0.0});
        for (int n = 1; n <= K; ++n)
            for (const auto& [th, w] : angle_weight) m[static_cast<size_t>(n) - 1] += w * std::polar(1.0, th * n);
        return CircleMomentSeq(std::move(m));
    }
};

inline MomentSeq moments_of(const AtomicMeasure& a, int K) {
    if (K < 1) throw std::invalid_argument("moments_of: order must be >= 1");
    std::vector<double> m(static_cast<size_t>(K), 0.0);
    for (const auto& [x, w] : a.atoms) {
        double p = 1.0;
        for (int n = 1; n <= K; ++n) {
            p *= x;
            m[static_cast<size_t>(n) - 1] += w * p;
        }
    }
    return MomentSeq(std::move(m));
}

inline MomentSeq moments_of(const GridDensity& g, int K) {
    if (K < 1) throw std::invalid_argument("moments_of: order must be >= 1");
    std::vector<double> m(static_cast<size_t>(K), 0.0);
    for (int n = 1; n <= K; ++n) {
        double acc = 0;
        for (size_t i = 0; i + 1 < g.ps.size(); ++i) {
            const double xa = g.x_at(i), xb = g.x_at(i + 1);
            acc += 0.5 * (std::pow(xa, n) * g.ps[i] + std::pow(xb, n) * g.ps[i + 1]) * g.step;
        }
        m[static_cast<size_t>(n) - 1] = acc;
    }
    return MomentSeq(std::move(m));
}

struct HankelReport {
    bool psd = false;            // verdict on the plain Hankel [m_{i+j}]
    double min_eig = 0.0;        // smallest eigenvalue of [m_{i+j}]
    double min_eig_shifted = 0;  // smallest eigenvalue of [m_{i+j+1}] (informational;
                                 // a test of nonnegative support, not of being a measure)
};

/// Moment-problem feasibility: the Hankel matrix [m_{i+j}], 0 <= i,j <= K/2,
/// must be PSD for a real representing measure to exist. Eigenvalue slack
/// -1e-10 absorbs float dust.
inline HankelReport hankel_psd(const MomentSeq& m) {
    if (m.order() < 2) throw std::invalid_argument("hankel_psd: need order >= 2");
    const int h = m.order() / 2;
    Eigen::MatrixXd H(h + 1, h + 1), Hs(h, h);
    for (int i = 0; i <= h; ++i)
        for (int j = 0; j <= h; ++j) H(i, j) = m[i + j];
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) Hs(i, j) = m[i + j + 1];
    HankelReport rep;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    rep.min_eig = es.eigenvalues().minCoeff();
    if (h >= 1) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(Hs, Eigen::EigenvaluesOnly);
        rep.min_eig_shifted = es2.eigenvalues().minCoeff();
    }
    rep.psd = rep.min_eig >= -1e-10;
    return rep;
}

/// Cumulants sigma_n defined by log integral e^{itx} dmu = sum sigma_n (it)^n,
/// i.e. the classical cumulant kappa_n divided by n!.
inline std::vector<double> classical_cumulants(const MomentSeq& m) {
    const int K = m.order();
    series::TruncatedSeries<double> f(K);
    f[0] = 1.0;
    double fact = 1.0;
    for (int n = 1; n <= K; ++n) {
        fact *= n;
        f[n] = m[n] / fact;
    }
    const auto lg = series::ser_exp_log(f, series::ExpLog::log);
    std::vector<double> sigma(static_cast<size_t>(K));
    for (int n = 1; n <= K; ++n) sigma[static_cast<size_t>(n) - 1] = lg[n];
    return sigma;
}

inline AtomicMeasure classical_convolve(const AtomicMeasure& a, const AtomicMeasure& b) {
    if (a.atoms.size() * b.atoms.size() > 1000000)
        throw std::invalid_argument("classical_convolve: atom product exceeds 1e6");
    std::vector<std::pair<double, double>> out;
    out.reserve(a.atoms.size() * b.atoms.size());
    for (const auto& [x, w] : a.atoms)
        for (const auto& [y, v] : b.atoms) out.emplace_back(x + y, w * v);
    return AtomicMeasure(std::move(out));
}

namespace detail {

// Right-continuous CDF evaluator over either representation.
struct Cdf {
    const AtomicMeasure* atomic = nullptr;
    const GridDensity* grid = nullptr;

    double operator()(double x) const {
        if (atomic) {
            double acc = 0;
            for (const auto& [a, w] : atomic->atoms) {
                if (a <= x) acc += w;
                else break;
            }
            return acc;
        }
        if (x <= grid->x0) return 0.0;
        double acc = 0;
        for (size_t i = 0; i + 1 < grid->ps.size(); ++i) {
            const double xa = grid->x_at(i), xb = grid->x_at(i + 1);
            if (x >= xb) {
                acc += 0.5 * (grid->ps[i] + grid->ps[i + 1]) * grid->step;
            } else {
                const double t = (x - xa) / grid->step;
                const double pm = grid->ps[i] + (grid->ps[i + 1] - grid->ps[i]) * t;
                acc += 0.5 * (grid->ps[i] + pm) * (x - xa);
                break;
            }
        }
        return acc;
    }

    void breakpoints(std::vector<double>& pts) const {
        if (atomic)
            for (const auto& [a, w] : atomic->atoms) {
                (void)w;
                pts.push_back(a);
            }
        else
            for (size_t i = 0; i < grid->ps.size(); ++i) pts.push_back(grid->x_at(i));
    }
};

inline double kolmogorov_impl(const Cdf& fa, const Cdf& fb) {
    std::vector<double> pts;
    fa.breakpoints(pts);
    fb.breakpoints(pts);
    std::sort(pts.begin(), pts.end());
    double sup = 0;
    for (double x : pts) {
        sup = std::max(sup, std::abs(fa(x) - fb(x)));
        const double eps = 1e-12 * std::max(1.0, std::abs(x)) + 1e-300;
        sup = std::max(sup, std::abs(fa(x - eps) - fb(x - eps)));  // left limits at jumps
    }
    return sup;
}

}  // namespace detail

/// sup |CDF_a - CDF_b| on the merged breakpoint set (left limits included).
inline double kolmogorov_distance(const AtomicMeasure& a, const AtomicMeasure& b) {
    detail::Cdf fa{&a, nullptr}, fb{&b, nullptr};
    return detail::kolmogorov_impl(fa, fb);
}
inline double kolmogorov_distance(const AtomicMeasure& a, const GridDensity& b) {
    detail::Cdf fa{&a, nullptr}, fb{nullptr, &b};
    return detail::kolmogorov_impl(fa, fb);
}
inline double kolmogorov_distance(const GridDensity& a, const AtomicMeasure& b) {
    return kolmogorov_distance(b, a);
}
inline double kolmogorov_distance(const GridDensity& a, const GridDensity& b) {
    detail::Cdf fa{nullptr, &a}, fb{nullptr, &b};
    return detail::kolmogorov_impl(fa, fb);
}

/// Pushforward under x -> s*x + t. s = 0 collapses to delta_t.
inline AtomicMeasure affine_map(const AtomicMeasure& a, double s, double t) {
    if (s == 0.0) return AtomicMeasure::dirac(t);
    std::vector<std::pair<double, double>> out;
    out.reserve(a.atoms.size());
    for (const auto& [x, w] : a.atoms) out.emplace_back(s * x + t, w);
    return AtomicMeasure(std::move(out));
}

inline GridDensity affine_map(const GridDensity& g, double s, double t) {
    if (s == 0.0) throw std::invalid_argument("affine_map: grid density cannot represent a point mass");
    std::vector<double> ps = g.ps;
    double x0 = s * g.x0 + t;
    if (s < 0) {
        std::reverse(ps.begin(), ps.end());
        x0 = s * g.x_at(g.ps.size() - 1) + t;
    }
    for (double& p : ps) p /= std::abs(s);
    return GridDensity(x0, std::abs(s) * g.step, std::move(ps), g.eps_mass);
}

/// Moment transform of the pushforward: m'_n = E[(sX+t)^n] by the binomial
/// expansion.
inline MomentSeq affine_map(const MomentSeq& m, double s, double t) {
    const int K = m.order();
    std::vector<double> out(static_cast<size_t>(K), 0.0);
    std::vector<std::vector<double>> binom(static_cast<size_t>(K) + 1);
    for (int n = 0; n <= K; ++n) {
        binom[static_cast<size_t>(n)].assign(static_cast<size_t>(n) + 1, 1.0);
        for (int k = 1; k < n; ++k)
            binom[static_cast<size_t>(n)][static_cast<size_t>(k)] =
                binom[static_cast<size_t>(n) - 1][static_cast<size_t>(k) - 1] +
                binom[static_cast<size_t>(n) - 1][static_cast<size_t>(k)];
    }
    for (int n = 1; n <= K; ++n) {
        double acc = 0;
        for (int k = 0; k <= n; ++k)
            acc += binom[static_cast<size_t>(n)][static_cast<size_t>(k)] * std::pow(s, k) *
                   std::pow(t, n - k) * m[k];
        out[static_cast<size_t>(n) - 1] = acc;
    }
    return MomentSeq(std::move(out));
}

/// "x,p" CSV with 17-significant-digit values, one row per grid node.
inline void write_csv(const GridDensity& g, std::ostream& os) {
    os << "x,p\n";
    char buf[64];
    for (size_t i = 0; i < g.ps.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.x_at(i), g.ps[i]);
        os << buf;
    }
}

inline GridDensity read_csv(std::istream& is, double eps_mass = 0.01) {
    std::string line;
    if (!std::getline(is, line) || line != "x,p")
        throw std::invalid_argument("GridDensity CSV: missing 'x,p' header");
    std::vector<double> xs, ps;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("GridDensity CSV: malformed row");
        xs.push_back(std::stod(line.substr(0, comma)));
        ps.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw std::invalid_argument("GridDensity CSV: too few rows");
    return GridDensity(xs.front(), (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1),
                       std::move(ps), eps_mass);
}

}  // namespace freeconv::measures
