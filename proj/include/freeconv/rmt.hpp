#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "freeconv/analytic.hpp"
#include "freeconv/cumulants.hpp"
#include "freeconv/measures.hpp"

// Random-matrix Monte Carlo harness: Haar-rotated matrices with prescribed
// spectra, empirical spectral distributions of sums, word traces, and the
// eigenvector transition (bistochastic overlap) experiment, each compared
// against the analytic prediction and serialized as an experiment report.

namespace freeconv::rmt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using json = nlohmann::ordered_json;

/// Deterministic generator: a 64-bit master seed; the substream for logical
/// stream id s is a std::mt19937_64 seeded with
/// splitmix64(master ^ splitmix64(s + 1)). Identical (seed, id) pairs give
/// bit-identical streams regardless of how trials are scheduled.
struct Rng {
    uint64_t master = 0;

    static uint64_t splitmix64(uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    struct Substream {
        std::mt19937_64 gen;

        /// uniform on (0,1]: (bits >> 11 + 1) * 2^-53
        double uniform01() {
            return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
        }
        /// standard complex Gaussian (independent N(0,1) real and imaginary
        /// parts) via the Box-Muller transform
        Complex gauss() {
            const double u1 = uniform01();
            const double u2 = uniform01();
            const double r = std::sqrt(-2.0 * std::log(u1));
            return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
        }
        /// uniform integer in [0, n)
        uint64_t below(uint64_t n) { return gen() % n; }
    };

    Substream substream(uint64_t id) const {
        Substream s;
        s.gen.seed(splitmix64(master ^ splitmix64(id + 1)));
        return s;
    }
};

/// Haar-distributed unitary: Ginibre matrix, Householder QR, then column
/// phases fixed so the R factor has positive diagonal.
inline Matrix haar_unitary(int N, Rng::Substream& rng) {
    if (N < 1) throw std::invalid_argument("haar_unitary: N must be >= 1");
    Matrix A(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) A(i, j) = rng.gauss();
    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ();
    const auto diag = qr.matrixQR().diagonal();
    for (int j = 0; j < N; ++j) {
        const Complex r = diag(j);
        Q.col(j) *= r / std::abs(r);
    }
    return Q;
}

/// Eigenvalue multiplicities for an atomic spectrum at dimension N:
/// largest-remainder rounding, ties broken toward the lower eigenvalue.
inline std::vector<int> spectrum_multiplicities(const measures::AtomicMeasure& spec, int N) {
    const size_t k = spec.atoms.size();
    std::vector<int> mult(k);
    std::vector<std::pair<double, size_t>> rem(k);
    int assigned = 0;
    for (size_t i = 0; i < k; ++i) {
        const double target = spec.atoms[i].second * N;
        mult[i] = static_cast<int>(std::floor(target));
        assigned += mult[i];
        rem[i] = {target - std::floor(target), i};
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // tie: lower eigenvalue first (atoms ascending)
    });
    for (int j = 0; j < N - assigned; ++j) ++mult[rem[static_cast<size_t>(j)].second];
    return mult;
}

/// diag of the prescribed spectrum, ascending.
inline Eigen::VectorXd spectrum_diagonal(const measures::AtomicMeasure& spec, int N) {
    const auto mult = spectrum_multiplicities(spec, N);
    Eigen::VectorXd d(N);
    int at = 0;
    for (size_t i = 0; i < spec.atoms.size(); ++i)
        for (int c = 0; c < mult[i]; ++c) d(at++) = spec.atoms[i].first;
    return d;
}

/// U D U* with D the deterministic diagonal model of the spectrum and U Haar.
inline Matrix conjugate_diag(const measures::AtomicMeasure& spec, int N, Rng::Substream& rng) {
    const Eigen::VectorXd d = spectrum_diagonal(spec, N);
    const Matrix U = haar_unitary(N, rng);
    Matrix M = U * d.asDiagonal() * U.adjoint();
    M = (M + M.adjoint().eval()) / 2.0;  // kill conjugation dust
    return M;
}

struct EigResult {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // empty unless requested
};

/// Backward-stable Hermitian eigensolve (Eigen's self-adjoint solver),
/// ascending eigenvalues; input must be Hermitian to 1e-12 (relative to the
/// largest entry).
inline EigResult hermitian_eigs(const Matrix& A, bool want_vectors = false) {
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("hermitian_eigs: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, want_vectors ? Eigen::ComputeEigenvectors
                                                             : Eigen::EigenvaluesOnly);
    EigResult r;
    r.values = es.eigenvalues();
    if (want_vectors) r.vectors = es.eigenvectors();
    return r;
}

inline measures::AtomicMeasure esd_of(const Eigen::VectorXd& eigs) {
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(static_cast<size_t>(eigs.size()));
    const double w = 1.0 / static_cast<double>(eigs.size());
    for (Eigen::Index i = 0; i < eigs.size(); ++i) atoms.emplace_back(eigs(i), w);
    return measures::AtomicMeasure(std::move(atoms));
}

struct Tolerances {
    double ks = 0.05;
    double moment = 0.05;
    double se_band = 3.0;
};

/// Monte Carlo estimates, their jackknife standard errors, analytic
/// reference values and distances, with a pass verdict against the
/// configured tolerances.
struct ExperimentReport {
    std::string experiment;
    json params = json::object();
    json estimates = json::object();
    json reference = json::object();
    json distances = json::object();
    bool pass = false;
    std::vector<std::tuple<int, std::string, double>> trial_stats;

    json to_json() const {
        json j;
        j["experiment"] = experiment;
        j["params"] = params;
        j["estimates"] = estimates;
        j["reference"] = reference;
        j["distances"] = distances;
        j["pass"] = pass;
        return j;
    }

    /// flat per-trial dump, "trial,stat,value"
    void write_trials_csv(std::ostream& os) const {
        os << "trial,stat,value\n";
        char buf[64];
        for (const auto& [t, stat, v] : trial_stats) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << t << ',' << stat << ',' << buf << '\n';
        }
    }
};

namespace detail {

inline double jackknife_se(const std::vector<double>& xs) {
    const size_t T = xs.size();
    if (T < 2) return 0.0;
    double total = 0;
    for (double x : xs) total += x;
    double loo_mean = 0;
    for (double x : xs) loo_mean += (total - x) / static_cast<double>(T - 1);
    loo_mean /= static_cast<double>(T);
    double ss = 0;
    for (double x : xs) {
        const double loo = (total - x) / static_cast<double>(T - 1);
        ss += (loo - loo_mean) * (loo - loo_mean);
    }
    return std::sqrt(ss * static_cast<double>(T - 1) / static_cast<double>(T));
}

inline double mean(const std::vector<double>& xs) {
    double acc = 0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

inline measures::GridDensity normalized(const measures::GridDensity& g) {
    const double m = g.mass();
    std::vector<double> ps = g.ps;
    for (double& p : ps) p /= m;
    return measures::GridDensity(g.x0, g.step, std::move(ps), 0.01);
}

/// analytic free-convolution density of two atomic spectra on an automatic
/// window, normalized for CDF comparisons
inline measures::GridDensity free_prediction_density(const measures::AtomicMeasure& a,
                                                     const measures::AtomicMeasure& b, int nodes = 601) {
    const auto ha = analytic::MeasureHandle::atomic(a);
    const auto hb = analytic::MeasureHandle::atomic(b);
    const double lo = a.min_support() + b.min_support() - 0.25;
    const double hi = a.max_support() + b.max_support() + 0.25;
    const double step = (hi - lo) / (nodes - 1);
    auto G = [&](Complex zeta) { return analytic::conv_G(ha, hb, zeta); };
    const auto rec = analytic::stieltjes_density(G, lo, hi, nodes, analytic::default_eps_schedule(step));
    return normalized(rec.density);
}

inline json moments_json(const std::vector<double>& v) {
    json j = json::array();
    for (double x : v) j.push_back(x);
    return j;
}

}  // namespace detail

/// ESD of A' + B' over independent Haar conjugations of the two spectra,
/// vs the free-convolution prediction.
inline ExperimentReport additive_experiment(const measures::AtomicMeasure& a, const measures::AtomicMeasure& b,
                                            int N, int trials, uint64_t seed, Tolerances tol = {}) {
    if (N < 50 || trials < 5) throw std::invalid_argument("additive_experiment: need N >= 50, trials >= 5");
    const Rng rng{seed};
    const int max_k = 6;
    const auto ref_m = cumulants::free_add_convolve(measures::moments_of(a, max_k), measures::moments_of(b, max_k));
    const auto ref_density = detail::free_prediction_density(a, b);

    ExperimentReport rep;
    rep.experiment = "additive";
    rep.params = {{"N", N}, {"trials", trials}, {"seed", seed}};

    std::vector<std::vector<double>> mom(static_cast<size_t>(max_k));
    std::vector<double> ks_per_trial;
    std::vector<std::pair<double, double>> pooled;
    for (int t = 0; t < trials; ++t) {
        auto s1 = rng.substream(static_cast<uint64_t>(t) * 8);
        auto s2 = rng.substream(static_cast<uint64_t>(t) * 8 + 1);
        const Matrix A = conjugate_diag(a, N, s1);
        const Matrix B = conjugate_diag(b, N, s2);
        const auto eig = hermitian_eigs(A + B);
        const auto esd = esd_of(eig.values);
        for (int k = 1; k <= max_k; ++k) {
            double acc = 0;
            for (Eigen::Index i = 0; i < eig.values.size(); ++i) acc += std::pow(eig.values(i), k);
            const double mk = acc / N;
            mom[static_cast<size_t>(k) - 1].push_back(mk);
            rep.trial_stats.emplace_back(t, "m" + std::to_string(k), mk);
        }
        const double ks = measures::kolmogorov_distance(esd, ref_density);
        ks_per_trial.push_back(ks);
        rep.trial_stats.emplace_back(t, "ks", ks);
        for (Eigen::Index i = 0; i < eig.values.size(); ++i)
            pooled.emplace_back(eig.values(i), 1.0 / (static_cast<double>(N) * trials));
    }
    const auto pooled_esd = measures::AtomicMeasure(std::move(pooled));
    const double pooled_ks = measures::kolmogorov_distance(pooled_esd, ref_density);

    json est = json::object();
    bool pass = pooled_ks <= tol.ks;
    for (int k = 1; k <= max_k; ++k) {
        const auto& xs = mom[static_cast<size_t>(k) - 1];
        const double m = detail::mean(xs);
        const double se = detail::jackknife_se(xs);
        est["m" + std::to_string(k)] = {{"mean", m}, {"se", se}, {"trials", trials}};
        if (k <= 4 && std::abs(m - ref_m[k]) > tol.moment) pass = false;
    }
    rep.estimates = est;
    rep.reference = {{"moments", detail::moments_json(ref_m.m)},
                     {"density_window", {ref_density.x0, ref_density.max_support()}}};
    rep.distances = {{"ks_pooled", pooled_ks},
                     {"ks_mean", detail::mean(ks_per_trial)},
                     {"ks_se", detail::jackknife_se(ks_per_trial)}};
    rep.pass = pass;
    return rep;
}

/// Diagonal model: permutation-conjugated diagonal matrices add like
/// classically convolved spectra; the free prediction is recorded as a
/// contrast distance.
inline ExperimentReport diagonal_experiment(const measures::AtomicMeasure& a, const measures::AtomicMeasure& b,
                                            int N, int trials, uint64_t seed, Tolerances tol = {}) {
    if (N < 50 || trials < 5) throw std::invalid_argument("diagonal_experiment: need N >= 50, trials >= 5");
    const Rng rng{seed};
    const auto classical = measures::classical_convolve(a, b);
    const auto free_density = detail::free_prediction_density(a, b);
    const Eigen::VectorXd da = spectrum_diagonal(a, N);
    const Eigen::VectorXd db = spectrum_diagonal(b, N);

    ExperimentReport rep;
    rep.experiment = "diagonal";
    rep.params = {{"N", N}, {"trials", trials}, {"seed", seed}};

    std::vector<double> ks_per_trial;
    std::vector<std::pair<double, double>> pooled;
    for (int t = 0; t < trials; ++t) {
        auto s = rng.substream(static_cast<uint64_t>(t) * 8 + 2);
        std::vector<int> perm(static_cast<size_t>(N));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = N - 1; i > 0; --i)  // Fisher-Yates from the documented stream
            std::swap(perm[static_cast<size_t>(i)], perm[s.below(static_cast<uint64_t>(i) + 1)]);
        Eigen::VectorXd sum(N);
        for (int i = 0; i < N; ++i) sum(i) = da(i) + db(perm[static_cast<size_t>(i)]);
        std::sort(sum.data(), sum.data() + N);
        const auto esd = esd_of(sum);
        const double ks = measures::kolmogorov_distance(esd, classical);
        ks_per_trial.push_back(ks);
        rep.trial_stats.emplace_back(t, "ks_classical", ks);
        for (int i = 0; i < N; ++i) pooled.emplace_back(sum(i), 1.0 / (static_cast<double>(N) * trials));
    }
    const auto pooled_esd = measures::AtomicMeasure(std::move(pooled));
    const double ks_classical = measures::kolmogorov_distance(pooled_esd, classical);
    const double ks_free = measures::kolmogorov_distance(pooled_esd, free_density);

    rep.estimates = {{"ks_classical_mean", detail::mean(ks_per_trial)},
                     {"ks_classical_se", detail::jackknife_se(ks_per_trial)}};
    json ref_atoms = json::array();
    for (const auto& [x, w] : classical.atoms) ref_atoms.push_back({x, w});
    rep.reference = {{"classical_atoms", ref_atoms}};
    rep.distances = {{"ks_classical_pooled", ks_classical}, {"ks_free_pooled", ks_free}};
    rep.pass = ks_classical <= tol.ks;
    return rep;
}

/// Trace of a word in the two rotated matrices vs the mixed-moment
/// prediction for free variables with the given marginals.
inline ExperimentReport word_trace_experiment(const cumulants::FreeWord& word, const measures::AtomicMeasure& a,
                                              const measures::AtomicMeasure& b, int N, int trials, uint64_t seed,
                                              Tolerances tol = {}) {
    if (word.length() > 8) throw std::invalid_argument("word_trace_experiment: word length capped at 8");
    for (char c : word.letters)
        if (c != 'X' && c != 'Y')
            throw std::invalid_argument("word_trace_experiment: letters must be X or Y");
    const Rng rng{seed};
    cumulants::FreeFamilySpec fam;
    const int ord = std::max(word.length(), 2);
    fam.marginals.emplace('X', cumulants::m2c(measures::moments_of(a, ord)));
    fam.marginals.emplace('Y', cumulants::m2c(measures::moments_of(b, ord)));
    const double ref = cumulants::mixed_moment(fam, word);

    ExperimentReport rep;
    rep.experiment = "word";
    rep.params = {{"N", N}, {"trials", trials}, {"seed", seed}, {"word", word.letters}};

    std::vector<double> est;
    for (int t = 0; t < trials; ++t) {
        auto s1 = rng.substream(static_cast<uint64_t>(t) * 8);
        auto s2 = rng.substream(static_cast<uint64_t>(t) * 8 + 1);
        const Matrix A = conjugate_diag(a, N, s1);
        const Matrix B = conjugate_diag(b, N, s2);
        Matrix M = Matrix::Identity(N, N);
        for (char c : word.letters) M = M * (c == 'X' ? A : B);
        const double v = M.trace().real() / N;
        est.push_back(v);
        rep.trial_stats.emplace_back(t, "trace", v);
    }
    const double m = detail::mean(est);
    const double se = detail::jackknife_se(est);
    rep.estimates = {{"trace", {{"mean", m}, {"se", se}, {"trials", trials}}}};
    rep.reference = {{"mixed_moment", ref}};
    rep.distances = {{"abs_error", std::abs(m - ref)}, {"se_units", se > 0 ? std::abs(m - ref) / se : 0.0}};
    rep.pass = std::abs(m - ref) <= tol.se_band * se;
    return rep;
}

namespace detail {

inline double poly_eval(const std::vector<double>& coeffs, double x) {
    double acc = 0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

/// phi(g(X+Y) f(X)) by expanding the polynomials into words in free X, Y
inline double poly_mixed_moment(const cumulants::FreeFamilySpec& fam, const std::vector<double>& f,
                                const std::vector<double>& g) {
    double acc = 0;
    for (size_t j = 0; j < g.size(); ++j) {
        if (g[j] == 0.0) continue;
        for (size_t i = 0; i < f.size(); ++i) {
            if (f[i] == 0.0) continue;
            if (i == 0 && j == 0) {
                acc += g[j] * f[i];
                continue;
            }
            // expand (X+Y)^j X^i into binary words
            double word_sum = 0;
            const size_t combos = size_t{1} << j;
            for (size_t mask = 0; mask < combos; ++mask) {
                std::string w;
                for (size_t bit = 0; bit < j; ++bit) w.push_back((mask >> bit) & 1 ? 'Y' : 'X');
                w.append(i, 'X');
                word_sum += cumulants::mixed_moment(fam, cumulants::FreeWord(w));
            }
            acc += g[j] * f[i] * word_sum;
        }
    }
    return acc;
}

}  // namespace detail

/// tr(g(A'+B') f(A'))/N through the bistochastic eigenvector-overlap matrix,
/// vs two analytic routes: the Markov-kernel integral and the free
/// mixed-moment expansion.
inline ExperimentReport kernel_experiment(const measures::AtomicMeasure& a, const measures::AtomicMeasure& b,
                                          const std::vector<double>& f, const std::vector<double>& g, int N,
                                          int trials, uint64_t seed, Tolerances tol = {},
                                          double route_gap_tol = 2e-2) {
    if (f.size() > 5 || g.size() > 5)
        throw std::invalid_argument("kernel_experiment: polynomial degrees capped at 4");
    const Rng rng{seed};

    // cumulant route
    cumulants::FreeFamilySpec fam;
    const int ord = 8;
    fam.marginals.emplace('X', cumulants::m2c(measures::moments_of(a, ord)));
    fam.marginals.emplace('Y', cumulants::m2c(measures::moments_of(b, ord)));
    const double ref_cumulant = detail::poly_mixed_moment(fam, f, g);

    // kernel route: sum_x w_x f(x) int g(u) k(x,du)
    const auto ha = analytic::MeasureHandle::atomic(a);
    const auto hb = analytic::MeasureHandle::atomic(b);
    const double u_lo = a.min_support() + b.min_support() - 0.5;
    const double u_hi = a.max_support() + b.max_support() + 0.5;
    const int nodes = 481;
    const double step = (u_hi - u_lo) / (nodes - 1);
    double ref_kernel = 0;
    double kernel_mass_min = 1.0;
    for (const auto& [x, w] : a.atoms) {
        const auto rec =
            analytic::markov_kernel_density(ha, hb, x, u_lo, u_hi, nodes, analytic::default_eps_schedule(step));
        kernel_mass_min = std::min(kernel_mass_min, rec.density.mass());
        double integral = 0;
        for (size_t i = 0; i + 1 < rec.density.ps.size(); ++i) {
            const double xa = rec.density.x_at(i), xb = rec.density.x_at(i + 1);
            integral += 0.5 *
                        (detail::poly_eval(g, xa) * rec.density.ps[i] +
                         detail::poly_eval(g, xb) * rec.density.ps[i + 1]) *
                        rec.density.step;
        }
        ref_kernel += w * detail::poly_eval(f, x) * integral;
    }

    ExperimentReport rep;
    rep.experiment = "kernel";
    rep.params = {{"N", N}, {"trials", trials}, {"seed", seed}, {"f", f}, {"g", g}};

    std::vector<double> est;
    double worst_bistochastic = 0;
    for (int t = 0; t < trials; ++t) {
        auto s1 = rng.substream(static_cast<uint64_t>(t) * 8);
        auto s2 = rng.substream(static_cast<uint64_t>(t) * 8 + 1);
        const Matrix A = conjugate_diag(a, N, s1);
        const Matrix B = conjugate_diag(b, N, s2);
        const auto ea = hermitian_eigs(A, true);
        const auto es = hermitian_eigs(A + B, true);
        const Matrix overlap = es.vectors.adjoint() * ea.vectors;  // <xi_k, gamma_l>
        Eigen::MatrixXd S = overlap.cwiseAbs2();
        for (int k = 0; k < N; ++k) {
            worst_bistochastic = std::max(worst_bistochastic, std::abs(S.row(k).sum() - 1.0));
            worst_bistochastic = std::max(worst_bistochastic, std::abs(S.col(k).sum() - 1.0));
        }
        Eigen::VectorXd gv(N), fv(N);
        for (int i = 0; i < N; ++i) {
            gv(i) = detail::poly_eval(g, es.values(i));
            fv(i) = detail::poly_eval(f, ea.values(i));
        }
        const double v = gv.dot(S * fv) / N;
        est.push_back(v);
        rep.trial_stats.emplace_back(t, "trace", v);
    }
    const double m = detail::mean(est);
    const double se = detail::jackknife_se(est);
    const double route_gap = std::abs(ref_cumulant - ref_kernel);
    rep.estimates = {{"trace", {{"mean", m}, {"se", se}, {"trials", trials}}},
                     {"bistochastic_defect", worst_bistochastic}};
    rep.reference = {{"cumulant_route", ref_cumulant},
                     {"kernel_route", ref_kernel},
                     {"kernel_min_mass", kernel_mass_min}};
    rep.distances = {{"route_gap", route_gap}, {"mc_error", std::abs(m - ref_cumulant)}};
    rep.pass = route_gap <= route_gap_tol && std::abs(m - ref_cumulant) <= tol.ks;
    return rep;
}

}  // namespace freeconv::rmt
