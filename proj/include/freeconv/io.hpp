#pragma once

#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "freeconv/analytic.hpp"
#include "freeconv/families.hpp"
#include "freeconv/measures.hpp"

// The measure-spec document: the one wire format every tool reads and
// emits. Real-line measures come as atoms, grid densities, truncated
// moments or named families; circle measures as unit-modulus atoms or
// complex moments.

namespace freeconv::io {

using json = nlohmann::ordered_json;

struct CircleAtoms {
    std::vector<std::pair<double, double>> angle_weight;  // (theta, w)
};

using MeasureDoc = std::variant<measures::AtomicMeasure, measures::GridDensity, measures::MomentSeq,
                                families::FamilySpec, measures::CircleMomentSeq, CircleAtoms>;

namespace detail {

inline double need_number(const json& params, const std::string& key) {
    if (!params.contains(key)) throw std::invalid_argument("measure doc: missing family parameter '" + key + "'");
    return params.at(key).get<double>();
}

inline families::FiniteMeasure parse_finite_measure(const json& arr) {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& it : arr) atoms.emplace_back(it.at(0).get<double>(), it.at(1).get<double>());
    return families::FiniteMeasure(std::move(atoms));
}

}  // namespace detail

inline families::FamilySpec parse_family(const std::string& name, const json& params) {
    using namespace families;
    if (name == "semicircle") return Semicircle{detail::need_number(params, "sigma")};
    if (name == "arcsine") return Arcsine{detail::need_number(params, "a"), detail::need_number(params, "b")};
    if (name == "bernoulli")
        return Bernoulli{detail::need_number(params, "p"), detail::need_number(params, "x0"),
                         detail::need_number(params, "x1")};
    if (name == "dirac") return Dirac{detail::need_number(params, "a")};
    if (name == "cauchy") return Cauchy{detail::need_number(params, "loc"), detail::need_number(params, "scale")};
    if (name == "free_stable") {
        FreeStable st;
        st.stable_case = static_cast<int>(detail::need_number(params, "case"));
        if (st.stable_case == 2) {
            st.a = {detail::need_number(params, "a_re"), detail::need_number(params, "a_im")};
            st.b = detail::need_number(params, "b");
        } else {
            st.alpha = detail::need_number(params, "alpha");
            st.theta = detail::need_number(params, "theta");
        }
        validate(FamilySpec(st));
        return st;
    }
    if (name == "freeLK") {
        FreeLK lk;
        lk.alpha = detail::need_number(params, "alpha");
        if (params.contains("nu")) lk.nu = detail::parse_finite_measure(params.at("nu"));
        return lk;
    }
    if (name == "free_poisson")
        return FreePoisson{detail::need_number(params, "lambda"), detail::need_number(params, "t"),
                           FreePoissonVariant::paper_r};
    if (name == "free_poisson_limit")
        return FreePoisson{detail::need_number(params, "lambda"), detail::need_number(params, "t"),
                           FreePoissonVariant::binomial_limit};
    if (name == "free_binomial")
        return FreeBinomial{static_cast<long long>(detail::need_number(params, "n")),
                            detail::need_number(params, "lambda"), detail::need_number(params, "t")};
    throw std::invalid_argument("measure doc: unknown family '" + name + "'");
}

inline std::pair<std::string, json> family_to_json(const families::FamilySpec& spec) {
    using namespace families;
    json p = json::object();
    if (const auto* s = std::get_if<Semicircle>(&spec)) {
        p["sigma"] = s->sigma;
        return {"semicircle", p};
    }
    if (const auto* a = std::get_if<Arcsine>(&spec)) {
        p["a"] = a->a;
        p["b"] = a->b;
        return {"arcsine", p};
    }
    if (const auto* b = std::get_if<Bernoulli>(&spec)) {
        p["p"] = b->p;
        p["x0"] = b->x0;
        p["x1"] = b->x1;
        return {"bernoulli", p};
    }
    if (const auto* d = std::get_if<Dirac>(&spec)) {
        p["a"] = d->a;
        return {"dirac", p};
    }
    if (const auto* c = std::get_if<Cauchy>(&spec)) {
        p["loc"] = c->loc;
        p["scale"] = c->scale;
        return {"cauchy", p};
    }
    if (const auto* st = std::get_if<FreeStable>(&spec)) {
        p["case"] = st->stable_case;
        if (st->stable_case == 2) {
            p["a_re"] = st->a.real();
            p["a_im"] = st->a.imag();
            p["b"] = st->b;
        } else {
            p["alpha"] = st->alpha;
            p["theta"] = st->theta;
        }
        return {"free_stable", p};
    }
    if (const auto* lk = std::get_if<FreeLK>(&spec)) {
        p["alpha"] = lk->alpha;
        json nu = json::array();
        for (const auto& [t, w] : lk->nu.atoms) nu.push_back({t, w});
        p["nu"] = nu;
        return {"freeLK", p};
    }
    if (const auto* fp = std::get_if<FreePoisson>(&spec)) {
        p["lambda"] = fp->lambda;
        p["t"] = fp->t;
        return {fp->variant == FreePoissonVariant::paper_r ? "free_poisson" : "free_poisson_limit", p};
    }
    if (const auto* fb = std::get_if<FreeBinomial>(&spec)) {
        p["n"] = fb->n;
        p["lambda"] = fb->lambda;
        p["t"] = fb->t;
        return {"free_binomial", p};
    }
    throw std::logic_error("family_to_json: unhandled family");
}

inline MeasureDoc parse_measure(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "atomic") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& it : j.at("atoms")) atoms.emplace_back(it.at(0).get<double>(), it.at(1).get<double>());
        return measures::AtomicMeasure(std::move(atoms));
    }
    if (type == "grid") {
        std::vector<double> ps = j.at("ps").get<std::vector<double>>();
        return measures::GridDensity(j.at("x0").get<double>(), j.at("step").get<double>(), std::move(ps));
    }
    if (type == "moments") return measures::MomentSeq(j.at("m").get<std::vector<double>>());
    if (type == "family") return parse_family(j.at("name").get<std::string>(), j.value("params", json::object()));
    if (type == "circle_atomic") {
        CircleAtoms c;
        for (const auto& it : j.at("atoms")) c.angle_weight.emplace_back(it.at(0).get<double>(), it.at(1).get<double>());
        return c;
    }
    if (type == "circle_moments") {
        std::vector<std::complex<double>> m;
        for (const auto& it : j.at("m")) m.emplace_back(it.at(0).get<double>(), it.at(1).get<double>());
        return measures::CircleMomentSeq(std::move(m));
    }
    throw std::invalid_argument("measure doc: unknown type '" + type + "'");
}

inline json measure_to_json(const MeasureDoc& doc) {
    json j;
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&doc)) {
        j["type"] = "atomic";
        json atoms = json::array();
        for (const auto& [x, w] : a->atoms) atoms.push_back({x, w});
        j["atoms"] = atoms;
        return j;
    }
    if (const auto* g = std::get_if<measures::GridDensity>(&doc)) {
        j["type"] = "grid";
        j["x0"] = g->x0;
        j["step"] = g->step;
        j["ps"] = g->ps;
        return j;
    }
    if (const auto* m = std::get_if<measures::MomentSeq>(&doc)) {
        j["type"] = "moments";
        j["m"] = m->m;
        return j;
    }
    if (const auto* f = std::get_if<families::FamilySpec>(&doc)) {
        const auto [name, params] = family_to_json(*f);
        j["type"] = "family";
        j["name"] = name;
        j["params"] = params;
        return j;
    }
    if (const auto* c = std::get_if<CircleAtoms>(&doc)) {
        j["type"] = "circle_atomic";
        json atoms = json::array();
        for (const auto& [th, w] : c->angle_weight) atoms.push_back({th, w});
        j["atoms"] = atoms;
        return j;
    }
    if (const auto* cm = std::get_if<measures::CircleMomentSeq>(&doc)) {
        j["type"] = "circle_moments";
        json m = json::array();
        for (const auto& v : cm->m) m.push_back({v.real(), v.imag()});
        j["m"] = m;
        return j;
    }
    throw std::logic_error("measure_to_json: unhandled representation");
}

inline MeasureDoc load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open measure file '" + path + "'");
    json j;
    in >> j;
    return parse_measure(j);
}

/// moment sequence of any real-line representation
inline measures::MomentSeq doc_moments(const MeasureDoc& doc, int K) {
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&doc)) return measures::moments_of(*a, K);
    if (const auto* g = std::get_if<measures::GridDensity>(&doc)) return measures::moments_of(*g, K);
    if (const auto* m = std::get_if<measures::MomentSeq>(&doc)) {
        if (m->order() < K) throw std::invalid_argument("measure doc: moment list shorter than requested order");
        return measures::MomentSeq(std::vector<double>(m->m.begin(), m->m.begin() + K));
    }
    if (const auto* f = std::get_if<families::FamilySpec>(&doc)) return families::family_moments(*f, K);
    throw std::invalid_argument("measure doc: circle measures have no real moment sequence");
}

/// pointwise analytic handle (atoms, grid or family; bare moments can't be
/// evaluated)
inline analytic::MeasureHandle doc_handle(const MeasureDoc& doc) {
    if (const auto* a = std::get_if<measures::AtomicMeasure>(&doc)) return analytic::MeasureHandle::atomic(*a);
    if (const auto* g = std::get_if<measures::GridDensity>(&doc)) return analytic::MeasureHandle::grid(*g);
    if (const auto* f = std::get_if<families::FamilySpec>(&doc)) return analytic::MeasureHandle::family(*f);
    throw std::invalid_argument("measure doc: representation has no pointwise Cauchy transform");
}

/// circle-moment view of a circle measure doc
inline measures::CircleMomentSeq doc_circle_moments(const MeasureDoc& doc, int K) {
    if (const auto* c = std::get_if<CircleAtoms>(&doc))
        return measures::CircleMomentSeq::from_atoms(c->angle_weight, K);
    if (const auto* cm = std::get_if<measures::CircleMomentSeq>(&doc)) {
        if (cm->order() < K) throw std::invalid_argument("measure doc: circle moments shorter than requested order");
        return measures::CircleMomentSeq(
            std::vector<std::complex<double>>(cm->m.begin(), cm->m.begin() + K));
    }
    throw std::invalid_argument("measure doc: not a circle measure");
}

/// parse "a:b:n" grid syntax
struct GridSpec {
    double lo = 0, hi = 0;
    int nodes = 0;
    double step() const { return (hi - lo) / (nodes - 1); }
};

inline GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::istringstream is(text);
    std::string part;
    if (!std::getline(is, part, ':')) throw std::invalid_argument("grid: expected a:b:n");
    g.lo = std::stod(part);
    if (!std::getline(is, part, ':')) throw std::invalid_argument("grid: expected a:b:n");
    g.hi = std::stod(part);
    if (!std::getline(is, part, ':')) throw std::invalid_argument("grid: expected a:b:n");
    g.nodes = std::stoi(part);
    if (!(g.lo < g.hi) || g.nodes < 2) throw std::invalid_argument("grid: need a < b and n >= 2");
    return g;
}

}  // namespace freeconv::io
