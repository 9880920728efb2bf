#include "widthlab/node_classes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace widthlab {

namespace {

using nlohmann::json;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void validate_family(const NodeFamily& f) {
    switch (f.kind) {
        case NodeKind::linear_threshold:
            if (f.input_dim < 1)
                throw std::invalid_argument("linear_threshold: input dimension must be >= 1");
            if (f.param_count != f.input_dim + 1)
                throw std::invalid_argument("linear_threshold: parameter count must be d+1");
            break;
        case NodeKind::smooth_mother: {
            if (f.input_dim < 1 || f.param_count < 1)
                throw std::invalid_argument("smooth_mother: d and k must be >= 1");
            if (!(f.lipschitz_constant > 0.0))
                throw std::invalid_argument("smooth_mother: lipschitz constant must be positive");
            if (f.mother_id == "logistic") {
                if (f.param_count < f.input_dim || f.param_count > f.input_dim + 2)
                    throw std::invalid_argument(
                        "logistic mother: k must be d, d+1 or d+2 (ridge parameters w, b, s)");
            } else if (f.mother_id != "constant" && f.mother_id != "coordinate") {
                throw std::invalid_argument("unknown mother id: " + f.mother_id);
            }
            break;
        }
        case NodeKind::fourier_atom:
            break;
    }
    if (f.parameter_box.size() != f.param_count)
        throw std::invalid_argument("NodeFamily: parameter box size must match parameter count");
    for (const auto& r : f.parameter_box) {
        if (!(r.lo <= r.hi)) throw std::invalid_argument("NodeFamily: empty parameter range");
        if (f.kind == NodeKind::smooth_mother && (r.lo < 0.0 || r.hi > 1.0))
            throw std::invalid_argument("smooth_mother: parameter box must lie inside [0,1]^k");
    }
}

double mother_value(const NodeFamily& fam, std::span<const double> x, std::span<const double> y) {
    if (fam.mother_id == "constant") return 0.5;
    if (fam.mother_id == "coordinate") return y[0];
    // logistic ridge
    const std::size_t d = fam.input_dim;
    double z = 0.0;
    for (std::size_t i = 0; i < d; ++i) z += (2.0 * y[i] - 1.0) * x[i];
    if (fam.param_count >= d + 1) z += 2.0 * y[d] - 1.0;
    const double steep = fam.param_count >= d + 2 ? 1.0 + 7.0 * y[d + 1] : 4.0;
    return logistic(steep * z);
}

}  // namespace

NodeFamily NodeFamily::linear_threshold(std::size_t d, std::vector<ParamRange> box) {
    NodeFamily f;
    f.kind = NodeKind::linear_threshold;
    f.input_dim = d;
    f.param_count = d + 1;
    if (box.empty()) box.assign(d + 1, ParamRange{-1.0, 1.0});
    f.parameter_box = std::move(box);
    validate_family(f);
    return f;
}

NodeFamily NodeFamily::smooth_mother(std::size_t d, std::size_t k, double lipschitz_constant,
                                     std::string mother) {
    NodeFamily f;
    f.kind = NodeKind::smooth_mother;
    f.input_dim = d;
    f.param_count = k;
    f.lipschitz_constant = lipschitz_constant;
    f.mother_id = std::move(mother);
    f.parameter_box.assign(k, ParamRange{0.0, 1.0});
    validate_family(f);
    return f;
}

NodeFamily NodeFamily::fourier_atom(std::size_t max_frequency) {
    NodeFamily f;
    f.kind = NodeKind::fourier_atom;
    f.input_dim = 1;
    f.param_count = 0;
    f.max_frequency = max_frequency;
    validate_family(f);
    return f;
}

FunctionVector evaluate_node(const NodeFamily& family, std::span<const double> params,
                             const DomainPtr& domain, double scale) {
    if (!domain) throw std::invalid_argument("evaluate_node: null domain");
    if (!(scale > 0.0)) throw std::invalid_argument("evaluate_node: scale must be positive");
    const std::size_t m = domain->size();
    std::vector<double> values(m);

    switch (family.kind) {
        case NodeKind::linear_threshold: {
            const std::size_t d = family.input_dim;
            if (params.size() != d + 1)
                throw std::invalid_argument("evaluate_node: threshold expects d+1 parameters");
            if (domain->dim() != d)
                throw std::invalid_argument("evaluate_node: domain dimension mismatch");
            for (std::size_t i = 0; i < m; ++i) {
                const auto x = domain->point(i);
                double z = params[d];
                for (std::size_t j = 0; j < d; ++j) z += params[j] * x[j];
                values[i] = z >= 0.0 ? scale : 0.0;
            }
            break;
        }
        case NodeKind::smooth_mother: {
            if (params.size() != family.param_count)
                throw std::invalid_argument("evaluate_node: mother expects k parameters");
            if (domain->dim() != family.input_dim)
                throw std::invalid_argument("evaluate_node: domain dimension mismatch");
            for (std::size_t i = 0; i < m; ++i)
                values[i] = scale * mother_value(family, domain->point(i), params);
            break;
        }
        case NodeKind::fourier_atom: {
            if (domain->dim() != 1)
                throw std::invalid_argument("evaluate_node: fourier atoms need a 1-d domain");
            if (params.size() != 2)
                throw std::invalid_argument("evaluate_node: fourier atom expects (freq, type)");
            const double freq = params[0];
            const int type = static_cast<int>(params[1]);  // 0 constant, 1 sin, 2 cos
            for (std::size_t i = 0; i < m; ++i) {
                const double t = domain->point(i)[0];
                double v = 1.0;
                if (type == 1) v = std::sin(freq * t);
                else if (type == 2) v = std::cos(freq * t);
                values[i] = scale * v;
            }
            break;
        }
    }
    return FunctionVector(domain, std::move(values));
}

Dictionary::Dictionary(NodeFamily family, DomainPtr domain, SampleMode mode,
                       std::vector<std::vector<double>> parameters, double scale,
                       std::uint64_t seed)
    : family_(std::move(family)), domain_(std::move(domain)), mode_(mode),
      parameters_(std::move(parameters)), scale_(scale), seed_(seed) {
    validate_family(family_);
    if (!(scale_ > 0.0)) throw std::invalid_argument("Dictionary: scale must be positive");
    if (parameters_.empty()) throw std::invalid_argument("Dictionary: no parameters");
    members_.reserve(parameters_.size());
    for (const auto& p : parameters_)
        members_.push_back(evaluate_node(family_, p, domain_, scale_));
}

namespace {

std::vector<std::vector<double>> lattice_parameters(const NodeFamily& fam,
                                                    std::size_t resolution) {
    if (resolution == 0) throw std::invalid_argument("sample_dictionary: resolution must be >= 1");
    std::vector<std::vector<double>> axes;
    for (const auto& r : fam.parameter_box) {
        std::vector<double> axis;
        if (r.hi == r.lo || resolution == 1) {
            axis.push_back(resolution == 1 ? 0.5 * (r.lo + r.hi) : r.lo);
        } else {
            for (std::size_t j = 0; j < resolution; ++j)
                axis.push_back(r.lo + (r.hi - r.lo) * static_cast<double>(j) /
                                          static_cast<double>(resolution - 1));
        }
        axes.push_back(std::move(axis));
    }
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        std::vector<double> p(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) p[i] = axes[i][idx[i]];
        out.push_back(std::move(p));
        // odometer: last axis fastest
        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
    }
}

void normalize_threshold(std::vector<double>& p) {
    double nrm = 0.0;
    for (double v : p) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
        for (double& v : p) v /= nrm;
}

}  // namespace

Dictionary sample_dictionary(const NodeFamily& family, const DomainPtr& domain, SampleMode mode,
                             std::size_t count_or_resolution, std::uint64_t seed, double scale) {
    validate_family(family);
    if (family.kind == NodeKind::fourier_atom) {
        std::vector<std::vector<double>> params;
        params.push_back({0.0, 0.0});
        for (std::size_t k = 1; k <= family.max_frequency; ++k) {
            params.push_back({static_cast<double>(k), 1.0});
            params.push_back({static_cast<double>(k), 2.0});
        }
        return Dictionary(family, domain, mode, std::move(params), scale, seed);
    }

    std::vector<std::vector<double>> params;
    if (mode == SampleMode::grid) {
        params = lattice_parameters(family, count_or_resolution);
    } else {
        if (count_or_resolution == 0)
            throw std::invalid_argument("sample_dictionary: count must be >= 1");
        Rng rng(seed);
        params.reserve(count_or_resolution);
        for (std::size_t i = 0; i < count_or_resolution; ++i) {
            std::vector<double> p(family.param_count);
            for (std::size_t j = 0; j < family.param_count; ++j)
                p[j] = rng.uniform(family.parameter_box[j].lo, family.parameter_box[j].hi);
            params.push_back(std::move(p));
        }
    }
    if (family.kind == NodeKind::linear_threshold)
        for (auto& p : params) normalize_threshold(p);
    return Dictionary(family, domain, mode, std::move(params), scale, seed);
}

double lipschitz_check(const Dictionary& dict, const NormSpec& spec, std::size_t trials,
                       std::uint64_t seed) {
    if (dict.family().kind != NodeKind::smooth_mother)
        throw std::invalid_argument("lipschitz_check: smooth_mother families only");
    if (dict.size() < 2)
        throw std::invalid_argument("lipschitz_check: need at least two members");
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t i = rng.index(dict.size());
        std::size_t j = rng.index(dict.size() - 1);
        if (j >= i) ++j;
        const auto& yi = dict.parameters()[i];
        const auto& yj = dict.parameters()[j];
        double dy = 0.0;
        for (std::size_t q = 0; q < yi.size(); ++q) dy += (yi[q] - yj[q]) * (yi[q] - yj[q]);
        dy = std::sqrt(dy);
        if (dy == 0.0) continue;
        const double df = lp_distance(dict.members()[i], dict.members()[j], spec) / dict.scale();
        worst = std::max(worst, df / dy);
    }
    return worst;
}

namespace {

json family_to_json(const NodeFamily& f) {
    json j;
    switch (f.kind) {
        case NodeKind::linear_threshold: j["kind"] = "linear_threshold"; break;
        case NodeKind::smooth_mother: j["kind"] = "smooth_mother"; break;
        case NodeKind::fourier_atom: j["kind"] = "fourier_atom"; break;
    }
    j["input_dim"] = f.input_dim;
    j["param_count"] = f.param_count;
    j["lipschitz_constant"] = f.lipschitz_constant;
    j["mother_id"] = f.mother_id;
    j["max_frequency"] = f.max_frequency;
    json box = json::array();
    for (const auto& r : f.parameter_box) box.push_back({r.lo, r.hi});
    j["parameter_box"] = box;
    return j;
}

NodeFamily family_from_json(const json& j) {
    NodeFamily f;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear_threshold") f.kind = NodeKind::linear_threshold;
    else if (kind == "smooth_mother") f.kind = NodeKind::smooth_mother;
    else if (kind == "fourier_atom") f.kind = NodeKind::fourier_atom;
    else throw ConfigError("unknown node family kind: " + kind);
    f.input_dim = j.at("input_dim").get<std::size_t>();
    f.param_count = j.at("param_count").get<std::size_t>();
    f.lipschitz_constant = j.at("lipschitz_constant").get<double>();
    f.mother_id = j.at("mother_id").get<std::string>();
    f.max_frequency = j.at("max_frequency").get<std::size_t>();
    f.parameter_box.clear();
    for (const auto& r : j.at("parameter_box"))
        f.parameter_box.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    validate_family(f);
    return f;
}

}  // namespace

std::string dictionary_to_json(const Dictionary& dict) {
    json j;
    j["family"] = family_to_json(dict.family());
    j["mode"] = dict.mode() == SampleMode::grid ? "grid" : "random";
    j["seed"] = dict.seed();
    j["scale"] = dict.scale();
    j["parameters"] = dict.parameters();
    return j.dump(2);
}

Dictionary dictionary_from_json(const std::string& text, const DomainPtr& domain) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("dictionary_from_json: ") + e.what());
    }
    const NodeFamily fam = family_from_json(j.at("family"));
    const SampleMode mode =
        j.at("mode").get<std::string>() == "grid" ? SampleMode::grid : SampleMode::random;
    const auto seed = j.at("seed").get<std::uint64_t>();
    const auto scale = j.at("scale").get<double>();
    auto params = j.at("parameters").get<std::vector<std::vector<double>>>();
    return Dictionary(fam, domain, mode, std::move(params), scale, seed);
}

}  // namespace widthlab
