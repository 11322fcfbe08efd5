#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <complex>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freeconv/analytic.hpp"
#include "freeconv/cumulants.hpp"
#include "freeconv/families.hpp"
#include "freeconv/io.hpp"
#include "freeconv/measures.hpp"
#include "freeconv/ncpart.hpp"
#include "freeconv/rmt.hpp"
#include "freeconv/version.hpp"

// Command-line front door. Every run prints a JSON document whose header
// records the artifact version and the fully resolved option set (plus the
// seed where one applies); grid densities go to CSV files in the exact
// "x,p" format.

namespace freeconv::cli {

using json = nlohmann::ordered_json;

namespace detail {

inline json make_header(const std::string& command, json options) {
    json h;
    h["version"] = freeconv::version;
    h["command"] = command;
    h["options"] = std::move(options);
    return h;
}

inline void emit(std::ostream& out, const json& doc) { out << doc.dump(2) << "\n"; }

inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) out.push_back(std::stod(part));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

inline json parse_params(const std::string& text) {
    json p = json::object();
    if (text.empty()) return p;
    std::istringstream is(text);
    std::string part;
    while (std::getline(is, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("params: expected k=v pairs");
        p[part.substr(0, eq)] = std::stod(part.substr(eq + 1));
    }
    return p;
}

inline std::vector<double> epsilon_schedule(double epsilon, const io::GridSpec& grid) {
    if (epsilon > 0) return {4 * epsilon, 2 * epsilon, epsilon};
    return analytic::default_eps_schedule(grid.step());
}

inline void write_density_csv(const std::string& path, const measures::GridDensity& g) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
    measures::write_csv(g, f);
}

inline measures::AtomicMeasure need_atomic(const io::MeasureDoc& doc, const std::string& which) {
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&doc)) return *a;
    throw std::invalid_argument(which + ": experiments need an atomic spectrum document");
}

}  // namespace detail

/// Run the tool on an argv-style argument list (without the program name).
/// Exit status: 0 on success, 1 on numeric non-convergence (a diagnostic
/// record is emitted), 2 on option or input errors.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"free-probability toolkit: free convolutions, cumulants, transforms, and random-matrix checks"};
    app.require_subcommand(1);

    // ---- nc
    auto* nc = app.add_subcommand("nc", "non-crossing partition lattice");
    int nc_n = 0;
    bool nc_list = false, nc_count = false, nc_moebius = false;
    nc->add_option("--n", nc_n, "ground-set size")->required();
    nc->add_flag("--list", nc_list, "list all partitions of NC(n)");
    nc->add_flag("--count", nc_count, "print |NC(n)|");
    nc->add_flag("--moebius", nc_moebius, "list mu(pi, 1_n) for every pi in NC(n)");

    // ---- cumulants
    auto* cum = app.add_subcommand("cumulants", "free cumulants of a measure");
    std::string cum_measure, cum_route = "a";
    int cum_order = 8;
    cum->add_option("--measure", cum_measure, "measure spec file")->required();
    cum->add_option("--order", cum_order, "truncation order");
    cum->add_option("--route", cum_route, "a (series) | b (partition recursion) | moebius")
        ->check(CLI::IsMember({"a", "b", "moebius"}));

    // ---- convolve
    auto* conv = app.add_subcommand("convolve", "free convolution of two measures");
    std::string conv_op, conv_lhs, conv_rhs, conv_grid_text, conv_csv;
    int conv_order = 8;
    bool conv_analytic = false;
    double conv_epsilon = 0;
    conv->add_option("--op", conv_op, "add | mult")->required()->check(CLI::IsMember({"add", "mult"}));
    conv->add_option("--lhs", conv_lhs, "left measure spec file")->required();
    conv->add_option("--rhs", conv_rhs, "right measure spec file")->required();
    conv->add_option("--order", conv_order, "truncation order");
    conv->add_flag("--analytic", conv_analytic, "also recover the density by Stieltjes inversion (add only)");
    conv->add_option("--grid", conv_grid_text, "density grid a:b:n");
    conv->add_option("--epsilon", conv_epsilon, "base of the evaluation-height schedule {4e,2e,e}");
    conv->add_option("--csv", conv_csv, "write the recovered density CSV here");

    // ---- density
    auto* dens = app.add_subcommand("density", "density of a measure by Stieltjes inversion");
    std::string dens_measure, dens_grid_text, dens_out;
    double dens_epsilon = 0;
    dens->add_option("--measure", dens_measure, "measure spec file")->required();
    dens->add_option("--grid", dens_grid_text, "grid a:b:n")->required();
    dens->add_option("--epsilon", dens_epsilon, "base of the evaluation-height schedule {4e,2e,e}");
    dens->add_option("--out", dens_out, "output CSV path")->required();

    // ---- family
    auto* fam = app.add_subcommand("family", "closed-form family: moments and R samples");
    std::string fam_name, fam_params;
    int fam_order = 8, fam_samples = 5;
    fam->add_option("--name", fam_name, "family name")->required();
    fam->add_option("--params", fam_params, "comma-separated k=v parameters");
    fam->add_option("--order", fam_order, "moment truncation order");
    fam->add_option("--r-samples", fam_samples, "number of R-transform sample points");

    // ---- simulate
    auto* sim = app.add_subcommand("simulate", "random-matrix Monte Carlo experiment");
    std::string sim_experiment, sim_lhs, sim_rhs, sim_word, sim_f = "0,1", sim_g = "0,1", sim_csv;
    int sim_N = 500, sim_trials = 20;
    uint64_t sim_seed = 0;
    sim->add_option("--experiment", sim_experiment, "additive | diagonal | word | kernel")
        ->required()
        ->check(CLI::IsMember({"additive", "diagonal", "word", "kernel"}));
    sim->add_option("--N", sim_N, "matrix dimension");
    sim->add_option("--trials", sim_trials, "number of Monte Carlo trials");
    sim->add_option("--seed", sim_seed, "master seed (no silent entropy)")->required();
    sim->add_option("--lhs", sim_lhs, "left spectrum file (atomic)")->required();
    sim->add_option("--rhs", sim_rhs, "right spectrum file (atomic)")->required();
    sim->add_option("--word", sim_word, "word in X/Y for the word experiment");
    sim->add_option("--f", sim_f, "polynomial coefficients c0,c1,... for f");
    sim->add_option("--g", sim_g, "polynomial coefficients c0,c1,... for g");
    sim->add_option("--csv", sim_csv, "write the per-trial dump here");

    // ---- kernel
    auto* ker = app.add_subcommand("kernel", "Markov transition kernel density k(x, du)");
    std::string ker_lhs, ker_rhs, ker_grid_text, ker_out;
    double ker_x = 0, ker_epsilon = 0;
    ker->add_option("--lhs", ker_lhs, "left measure spec file")->required();
    ker->add_option("--rhs", ker_rhs, "right measure spec file")->required();
    ker->add_option("--x", ker_x, "conditioning point in the support of lhs")->required();
    ker->add_option("--grid", ker_grid_text, "grid a:b:n")->required();
    ker->add_option("--epsilon", ker_epsilon, "base of the evaluation-height schedule {4e,2e,e}");
    ker->add_option("--out", ker_out, "output CSV path")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "option error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*nc) {
            if (static_cast<int>(nc_list) + static_cast<int>(nc_count) + static_cast<int>(nc_moebius) != 1)
                throw std::invalid_argument("nc: pass exactly one of --list, --count, --moebius");
            json options{{"n", nc_n},
                         {"mode", nc_list ? "list" : (nc_count ? "count" : "moebius")}};
            json doc;
            doc["header"] = detail::make_header("nc", options);
            doc["n"] = nc_n;
            if (nc_count) {
                if (nc_n <= 14) {
                    doc["count"] = ncpart::enumerate_nc(nc_n).partitions.size();
                } else {
                    doc["count"] = ncpart::catalan(nc_n);
                }
            } else {
                const auto idx = ncpart::enumerate_nc(nc_n);
                if (nc_list) {
                    json parts = json::array();
                    for (const auto& p : idx.partitions) parts.push_back(ncpart::to_string(p));
                    doc["partitions"] = parts;
                } else {
                    json mo = json::array();
                    for (const auto& p : idx.partitions)
                        mo.push_back({{"partition", ncpart::to_string(p)}, {"mu", ncpart::moebius_to_top(p)}});
                    doc["moebius"] = mo;
                }
            }
            detail::emit(out, doc);
            return 0;
        }

        if (*cum) {
            json options{{"measure", cum_measure}, {"order", cum_order}, {"route", cum_route}};
            const auto doc_in = io::load_measure(cum_measure);
            const auto m = io::doc_moments(doc_in, cum_order);
            const auto route = cum_route == "a" ? cumulants::Route::series
                               : cum_route == "b" ? cumulants::Route::nc
                                                  : cumulants::Route::moebius;
            const auto c = cumulants::m2c(m, route);
            json doc;
            doc["header"] = detail::make_header("cumulants", options);
            doc["order"] = cum_order;
            doc["route"] = cum_route;
            doc["moments"] = m.m;
            doc["cumulants"] = c.C;
            detail::emit(out, doc);
            return 0;
        }

        if (*conv) {
            json options{{"op", conv_op},     {"lhs", conv_lhs},         {"rhs", conv_rhs},
                         {"order", conv_order}, {"analytic", conv_analytic}, {"grid", conv_grid_text},
                         {"epsilon", conv_epsilon}, {"csv", conv_csv}};
            const auto lhs = io::load_measure(conv_lhs);
            const auto rhs = io::load_measure(conv_rhs);
            json doc;
            doc["header"] = detail::make_header("convolve", options);
            if (conv_op == "add") {
                const auto m = cumulants::free_add_convolve(io::doc_moments(lhs, conv_order),
                                                            io::doc_moments(rhs, conv_order));
                doc["moments"] = m.m;
                if (conv_analytic) {
                    if (conv_grid_text.empty())
                        throw std::invalid_argument("convolve: --analytic needs --grid a:b:n");
                    const auto grid = io::parse_grid(conv_grid_text);
                    const auto ha = io::doc_handle(lhs);
                    const auto hb = io::doc_handle(rhs);
                    auto G = [&](std::complex<double> zeta) { return analytic::conv_G(ha, hb, zeta); };
                    const auto rec = analytic::stieltjes_density(G, grid.lo, grid.hi, grid.nodes,
                                                                 detail::epsilon_schedule(conv_epsilon, grid));
                    doc["mass_defect"] = rec.mass_defect;
                    if (!conv_csv.empty()) {
                        detail::write_density_csv(conv_csv, rec.density);
                        doc["density_csv"] = conv_csv;
                    } else {
                        doc["density"] = io::measure_to_json(io::MeasureDoc(rec.density));
                    }
                }
            } else {
                const auto a = io::doc_circle_moments(lhs, conv_order);
                const auto b = io::doc_circle_moments(rhs, conv_order);
                const auto c = families::mult_convolve(a, b, conv_order);
                json m = json::array();
                for (const auto& v : c.m) m.push_back({v.real(), v.imag()});
                doc["circle_moments"] = m;
            }
            detail::emit(out, doc);
            return 0;
        }

        if (*dens) {
            json options{{"measure", dens_measure},
                         {"grid", dens_grid_text},
                         {"epsilon", dens_epsilon},
                         {"out", dens_out}};
            const auto grid = io::parse_grid(dens_grid_text);
            const auto h = io::doc_handle(io::load_measure(dens_measure));
            auto G = [&](std::complex<double> zeta) { return analytic::cauchy_G(h, zeta); };
            const auto rec = analytic::stieltjes_density(G, grid.lo, grid.hi, grid.nodes,
                                                         detail::epsilon_schedule(dens_epsilon, grid));
            detail::write_density_csv(dens_out, rec.density);
            json doc;
            doc["header"] = detail::make_header("density", options);
            doc["mass_defect"] = rec.mass_defect;
            doc["csv"] = dens_out;
            detail::emit(out, doc);
            return 0;
        }

        if (*fam) {
            json options{{"name", fam_name},
                         {"params", fam_params},
                         {"order", fam_order},
                         {"r_samples", fam_samples}};
            const auto spec = io::parse_family(fam_name, detail::parse_params(fam_params));
            json doc;
            doc["header"] = detail::make_header("family", options);
            doc["family"] = io::measure_to_json(io::MeasureDoc(spec));
            try {
                doc["moments"] = families::family_moments(spec, fam_order).m;
            } catch (const std::domain_error& e) {
                doc["moments_unavailable"] = e.what();
            }
            json samples = json::array();
            for (int j = 1; j <= fam_samples; ++j) {
                const std::complex<double> z(0.0, -0.05 * j);
                try {
                    const auto r = families::family_R(spec, z);
                    samples.push_back({{"z", {z.real(), z.imag()}}, {"R", {r.real(), r.imag()}}});
                } catch (const std::exception& e) {
                    samples.push_back({{"z", {z.real(), z.imag()}}, {"error", e.what()}});
                }
            }
            doc["R_samples"] = samples;
            if (const auto* fp = std::get_if<families::FreePoisson>(&spec)) {
                const auto cmp = families::free_poisson_comparison(fp->lambda, fp->t);
                doc["free_poisson_comparison"] = {{"lambda", cmp.lambda},
                                                  {"t", cmp.t},
                                                  {"n", cmp.n},
                                                  {"c2_free_binomial", cmp.c2_free_binomial},
                                                  {"c2_binomial_limit", cmp.c2_binomial_limit},
                                                  {"c2_paper_r", cmp.c2_paper_r},
                                                  {"binomial_limit_rel_err", cmp.binomial_limit_rel_err},
                                                  {"discrepancy", cmp.discrepancy}};
            }
            detail::emit(out, doc);
            return 0;
        }

        if (*sim) {
            json options{{"experiment", sim_experiment},
                         {"N", sim_N},
                         {"trials", sim_trials},
                         {"seed", sim_seed},
                         {"lhs", sim_lhs},
                         {"rhs", sim_rhs},
                         {"word", sim_word},
                         {"f", sim_f},
                         {"g", sim_g},
                         {"csv", sim_csv}};
            const auto a = detail::need_atomic(io::load_measure(sim_lhs), "lhs");
            const auto b = detail::need_atomic(io::load_measure(sim_rhs), "rhs");
            rmt::ExperimentReport rep;
            if (sim_experiment == "additive") {
                rep = rmt::additive_experiment(a, b, sim_N, sim_trials, sim_seed);
            } else if (sim_experiment == "diagonal") {
                rep = rmt::diagonal_experiment(a, b, sim_N, sim_trials, sim_seed);
            } else if (sim_experiment == "word") {
                if (sim_word.empty()) throw std::invalid_argument("simulate: word experiment needs --word");
                rep = rmt::word_trace_experiment(cumulants::FreeWord(sim_word), a, b, sim_N, sim_trials, sim_seed);
            } else {
                rep = rmt::kernel_experiment(a, b, detail::parse_double_list(sim_f),
                                             detail::parse_double_list(sim_g), sim_N, sim_trials, sim_seed);
            }
            if (!sim_csv.empty()) {
                std::ofstream f(sim_csv);
                if (!f) throw std::invalid_argument("cannot open output file '" + sim_csv + "'");
                rep.write_trials_csv(f);
            }
            json doc;
            doc["header"] = detail::make_header("simulate", options);
            doc.update(rep.to_json());
            detail::emit(out, doc);
            return 0;
        }

        if (*ker) {
            json options{{"lhs", ker_lhs}, {"rhs", ker_rhs},         {"x", ker_x},
                         {"grid", ker_grid_text}, {"epsilon", ker_epsilon}, {"out", ker_out}};
            const auto grid = io::parse_grid(ker_grid_text);
            const auto ha = io::doc_handle(io::load_measure(ker_lhs));
            const auto hb = io::doc_handle(io::load_measure(ker_rhs));
            const auto rec = analytic::markov_kernel_density(ha, hb, ker_x, grid.lo, grid.hi, grid.nodes,
                                                             detail::epsilon_schedule(ker_epsilon, grid));
            detail::write_density_csv(ker_out, rec.density);
            json doc;
            doc["header"] = detail::make_header("kernel", options);
            doc["mass_defect"] = rec.mass_defect;
            doc["csv"] = ker_out;
            detail::emit(out, doc);
            return 0;
        }
    } catch (const analytic::ConvergenceError& e) {
        json doc;
        doc["error"] = {{"type", "non_convergence"},
                        {"message", e.what()},
                        {"query", {e.query.real(), e.query.imag()}},
                        {"residual", e.residual},
                        {"iterations", e.iterations}};
        detail::emit(out, doc);
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace freeconv::cli
