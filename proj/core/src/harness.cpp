#include "widthlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace widthlab {

namespace {

using nlohmann::json;

// fixed sub-stream tags for seed derivation
constexpr std::uint64_t kDomainStream = 1;
constexpr std::uint64_t kDictionaryStream = 2;
constexpr std::uint64_t kTargetStream = 3;
constexpr std::uint64_t kShiftStream = 41;
constexpr std::uint64_t kCollapseStream = 42;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

void validate_increasing(const std::vector<double>& xs, const std::string& what) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw ConfigError("config: " + what + " must be strictly increasing");
}

void validate_increasing(const std::vector<std::size_t>& xs, const std::string& what) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw ConfigError("config: " + what + " must be strictly increasing");
}

}  // namespace

NodeFamily ClassConfig::node_family() const {
    if (is_sobolev())
        throw ConfigError("config: sobolev class has no node family");
    NodeFamily fam;
    if (kind == "linear_threshold") {
        fam = NodeFamily::linear_threshold(input_dim, parameter_box);
    } else if (kind == "smooth_mother") {
        fam = NodeFamily::smooth_mother(input_dim, param_count, lipschitz_constant, mother_id);
        if (!parameter_box.empty()) {
            if (parameter_box.size() != param_count)
                throw ConfigError("config: parameter_box size must equal param_count");
            fam.parameter_box = parameter_box;
        }
    } else if (kind == "fourier_atom") {
        fam = NodeFamily::fourier_atom(max_frequency);
    } else {
        throw ConfigError("config: unknown class kind '" + kind + "'");
    }
    return fam;
}

DomainPtr ExperimentConfig::build_domain() const {
    if (domain.type == "torus") {
        return GridDomain::torus(domain.size);
    }
    if (domain.type == "monte_carlo") {
        const std::size_t dim = domain.dim > 0 ? domain.dim : klass.input_dim;
        return GridDomain::monte_carlo_cube(dim, domain.size, derive_seed(seed, kDomainStream));
    }
    throw ConfigError("config: unknown domain type '" + domain.type + "'");
}

Dictionary ExperimentConfig::build_dictionary(const DomainPtr& dom) const {
    const NodeFamily fam = klass.node_family();
    const std::size_t arg =
        dictionary.mode == SampleMode::grid ? dictionary.resolution : dictionary.count;
    return sample_dictionary(fam, dom, dictionary.mode, arg,
                             derive_seed(seed, kDictionaryStream), dictionary.scale);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, "config",
               {"seed", "jobs", "class", "norm", "dictionary", "sweep", "solver", "bounds",
                "sobolev", "verify", "output"});

    ExperimentConfig cfg;
    if (!j.contains("seed")) throw ConfigError("config: 'seed' is required");
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.jobs = get_or<int>(j, "jobs", 1);
    if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");

    if (j.contains("class")) {
        const json& c = j.at("class");
        check_keys(c, "class",
                   {"kind", "input_dim", "param_count", "lipschitz_constant", "mother_id",
                    "max_frequency", "parameter_box", "r", "C"});
        cfg.klass.kind = get_or<std::string>(c, "kind", "");
        if (cfg.klass.kind.empty()) throw ConfigError("config: class.kind is required");
        cfg.klass.input_dim = get_or<std::size_t>(c, "input_dim", 1);
        cfg.klass.param_count = get_or<std::size_t>(c, "param_count", 0);
        cfg.klass.lipschitz_constant = get_or<double>(c, "lipschitz_constant", 1.0);
        cfg.klass.mother_id = get_or<std::string>(c, "mother_id", "logistic");
        cfg.klass.max_frequency = get_or<std::size_t>(c, "max_frequency", 0);
        cfg.klass.r = get_or<int>(c, "r", 1);
        cfg.klass.C = get_or<double>(c, "C", 7.0);
        if (c.contains("parameter_box")) {
            for (const auto& range : c.at("parameter_box")) {
                if (!range.is_array() || range.size() != 2)
                    throw ConfigError("config: parameter_box entries must be [lo, hi]");
                cfg.klass.parameter_box.push_back(
                    {range.at(0).get<double>(), range.at(1).get<double>()});
            }
        }
        if (!cfg.klass.is_sobolev()) cfg.klass.node_family();  // validate eagerly
    }

    if (j.contains("norm")) {
        const json& n = j.at("norm");
        check_keys(n, "norm", {"p", "domain"});
        cfg.p = get_or<double>(n, "p", 2.0);
        if (!(cfg.p >= 1.0) || !std::isfinite(cfg.p))
            throw ConfigError("config: norm.p must be finite and >= 1");
        if (n.contains("domain")) {
            const json& d = n.at("domain");
            check_keys(d, "norm.domain", {"type", "size", "dim"});
            cfg.domain.type = get_or<std::string>(d, "type", "monte_carlo");
            cfg.domain.size = get_or<std::size_t>(d, "size", 2000);
            cfg.domain.dim = get_or<std::size_t>(d, "dim", 0);
            if (cfg.domain.type != "torus" && cfg.domain.type != "monte_carlo")
                throw ConfigError("config: domain type must be 'torus' or 'monte_carlo'");
            if (cfg.domain.size == 0) throw ConfigError("config: domain size must be >= 1");
        }
    }

    if (j.contains("dictionary")) {
        const json& d = j.at("dictionary");
        check_keys(d, "dictionary", {"mode", "count", "resolution", "scale"});
        const std::string mode = get_or<std::string>(d, "mode", "random");
        if (mode == "grid") cfg.dictionary.mode = SampleMode::grid;
        else if (mode == "random") cfg.dictionary.mode = SampleMode::random;
        else throw ConfigError("config: dictionary.mode must be 'grid' or 'random'");
        cfg.dictionary.count = get_or<std::size_t>(d, "count", 200);
        cfg.dictionary.resolution = get_or<std::size_t>(d, "resolution", 8);
        cfg.dictionary.scale = get_or<double>(d, "scale", 1.0);
        if (!(cfg.dictionary.scale > 0.0))
            throw ConfigError("config: dictionary.scale must be positive");
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(s, "sweep", {"n", "epsilon"});
        if (s.contains("n")) cfg.sweep_n = s.at("n").get<std::vector<std::size_t>>();
        if (s.contains("epsilon")) cfg.sweep_epsilon = s.at("epsilon").get<std::vector<double>>();
        validate_increasing(cfg.sweep_n, "sweep.n");
        validate_increasing(cfg.sweep_epsilon, "sweep.epsilon");
        for (double e : cfg.sweep_epsilon)
            if (!(e > 0.0)) throw ConfigError("config: sweep.epsilon values must be positive");
        for (std::size_t n : cfg.sweep_n)
            if (n == 0) throw ConfigError("config: sweep.n values must be >= 1");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, "solver", {"tol", "max_iter", "trials"});
        cfg.solver.tol = get_or<double>(s, "tol", 1e-9);
        cfg.solver.max_iter = get_or<int>(s, "max_iter", 200);
        cfg.solver.trials = get_or<std::size_t>(s, "trials", 32);
        if (!(cfg.solver.tol > 0.0)) throw ConfigError("config: solver.tol must be positive");
        if (cfg.solver.max_iter < 1) throw ConfigError("config: solver.max_iter must be >= 1");
        if (cfg.solver.trials < 1) throw ConfigError("config: solver.trials must be >= 1");
    }

    if (j.contains("bounds")) {
        const json& b = j.at("bounds");
        check_keys(b, "bounds", {"K_const"});
        cfg.k_const = get_or<double>(b, "K_const", 1.0);
        if (!(cfg.k_const > 0.0)) throw ConfigError("config: bounds.K_const must be positive");
    }

    if (j.contains("sobolev")) {
        const json& s = j.at("sobolev");
        check_keys(s, "sobolev", {"lambda", "truncation", "series_truncation"});
        cfg.sobolev.lambda = get_or<double>(s, "lambda", 0.0);
        cfg.sobolev.truncation = get_or<std::size_t>(s, "truncation", 256);
        cfg.sobolev.series_truncation = get_or<std::size_t>(s, "series_truncation", 10000);
    }

    if (j.contains("verify")) {
        const json& v = j.at("verify");
        check_keys(v, "verify", {"instances", "max_dim", "max_atoms"});
        cfg.verify.instances = get_or<std::size_t>(v, "instances", 1000);
        cfg.verify.max_dim = get_or<std::size_t>(v, "max_dim", 64);
        cfg.verify.max_atoms = get_or<std::size_t>(v, "max_atoms", 16);
        if (cfg.verify.instances == 0 || cfg.verify.max_dim == 0 || cfg.verify.max_atoms == 0)
            throw ConfigError("config: verify settings must be >= 1");
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"dir", "format", "include_timing", "svg"});
        cfg.output.dir = get_or<std::string>(o, "dir", "out");
        cfg.output.format = get_or<std::string>(o, "format", "csv");
        cfg.output.include_timing = get_or<bool>(o, "include_timing", false);
        cfg.output.svg = get_or<bool>(o, "svg", false);
        if (cfg.output.format != "csv" && cfg.output.format != "json")
            throw ConfigError("config: output.format must be 'csv' or 'json'");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

namespace {

struct SweepTarget {
    FunctionVector values;
    std::vector<std::size_t> member_indices;
    std::vector<double> coefficients;
};

/// A random member of the sampled hull: up to 32 distinct dictionary members
/// with signed coefficients drawn uniformly from the l1 sphere, then scaled by
/// a uniform mass in [0, 1].
SweepTarget draw_target(const Dictionary& dict, Rng& rng) {
    const std::size_t take = std::min<std::size_t>(32, dict.size());
    std::vector<std::size_t> pool(dict.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    SweepTarget target{FunctionVector::zero(dict.domain()), {}, {}};
    target.member_indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(target.member_indices.begin(), target.member_indices.end());

    std::vector<double> mags(take);
    double total = 0.0;
    for (double& v : mags) {
        v = -std::log(1.0 - rng.uniform());
        total += v;
    }
    const double mass = rng.uniform();
    target.coefficients.resize(take);
    for (std::size_t i = 0; i < take; ++i)
        target.coefficients[i] = rng.sign() * mass * mags[i] / total;

    std::vector<FunctionVector> used;
    used.reserve(take);
    for (std::size_t idx : target.member_indices) used.push_back(dict.members()[idx]);
    target.values = combine(used, target.coefficients);
    return target;
}

}  // namespace

double bound_error_at(const ExperimentConfig& config, std::size_t n) {
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double dn = static_cast<double>(n);
    if (config.klass.kind == "smooth_mother") {
        const double k = static_cast<double>(config.klass.param_count);
        return std::pow(dn, -1.0 / k);
    }
    if (config.klass.kind == "linear_threshold") {
        // invert n = K V (4e)^V (1/eps)^{p(V-1)} with V = d + 1
        const double v = static_cast<double>(config.klass.input_dim) + 1.0;
        const double expo = config.p * (v - 1.0);
        const double c =
            std::pow(config.k_const * v * std::pow(4.0 * std::numbers::e, v), 1.0 / expo);
        return c * std::pow(dn, -1.0 / expo);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<RateRecord> run_sweep(const ExperimentConfig& config) {
    if (config.klass.is_sobolev())
        throw ConfigError("run_sweep: sobolev classes use the sobolev command");
    if (config.sweep_n.empty() && config.sweep_epsilon.empty())
        throw ConfigError("run_sweep: sweep values required");
    if (!config.sweep_n.empty() && !config.sweep_epsilon.empty())
        throw ConfigError("run_sweep: give either sweep.n or sweep.epsilon, not both");

    const DomainPtr domain = config.build_domain();
    const NormSpec spec(config.p, domain);
    const Dictionary dict = config.build_dictionary(domain);

    // shared targets: identical across cells so errors are comparable in n
    const std::uint64_t target_seed = derive_seed(config.seed, kTargetStream);
    std::vector<SweepTarget> targets;
    targets.reserve(config.solver.trials);
    for (std::size_t t = 0; t < config.solver.trials; ++t) {
        Rng rng(derive_seed(target_seed, t));
        targets.push_back(draw_target(dict, rng));
    }

    // one farthest-point ordering serves every cell (nested bases)
    const bool by_n = !config.sweep_n.empty();
    std::size_t max_centers = dict.size();
    if (by_n)
        max_centers = std::min<std::size_t>(dict.size(), config.sweep_n.back());
    const FpsTrace trace = farthest_point_trace(dict, spec, max_centers);

    struct Cell {
        std::size_t n;       // requested budget (or derived size for eps sweeps)
        std::size_t size;    // actual prefix length
    };
    std::vector<Cell> cells;
    if (by_n) {
        for (std::size_t n : config.sweep_n)
            cells.push_back({n, std::min(n, trace.order.size())});
    } else {
        // smallest prefix certified at each requested epsilon
        for (auto it = config.sweep_epsilon.rbegin(); it != config.sweep_epsilon.rend(); ++it) {
            std::size_t size = trace.order.size();
            for (std::size_t s = 0; s < trace.residual_after.size(); ++s)
                if (trace.residual_after[s] <= *it) {
                    size = s + 1;
                    break;
                }
            cells.push_back({size, size});
        }
    }

    std::vector<RateRecord> records(cells.size());
    parallel_for(cells.size(), config.jobs, [&](std::size_t ci) {
        const auto t0 = std::chrono::steady_clock::now();
        const Cell cell = cells[ci];
        const std::size_t size = cell.size;

        EpsCover cover;
        cover.center_indices.assign(trace.order.begin(),
                                    trace.order.begin() + static_cast<std::ptrdiff_t>(size));
        cover.max_residual = trace.residual_after[size - 1];
        cover.epsilon = cover.max_residual;
        cover.certified = true;

        std::vector<FunctionVector> basis;
        basis.reserve(size);
        std::vector<std::size_t> position(dict.size(), dict.size());
        for (std::size_t s = 0; s < size; ++s) {
            basis.push_back(dict.members()[cover.center_indices[s]]);
            position[cover.center_indices[s]] = s;
        }

        SolverOptions options;
        options.tol = config.solver.tol;
        options.max_iter = config.solver.max_iter;

        double worst = 0.0;
        for (const SweepTarget& target : targets) {
            // the collapse of the target onto the cover both certifies the
            // width bound and seeds the solver
            const ApproxResult collapsed =
                collapse_to_cover(dict, target.member_indices, target.coefficients, cover, spec);
            ConvexCombination warm;
            warm.indices.reserve(collapsed.combination.indices.size());
            for (std::size_t idx : collapsed.combination.indices)
                warm.indices.push_back(position[idx]);
            warm.coefficients = collapsed.combination.coefficients;
            warm.l1_mass = collapsed.combination.l1_mass;

            const ApproxResult fit =
                convex_fit(target.values, basis, size, spec, options, &warm);
            worst = std::max(worst, std::min(fit.error, collapsed.error));
        }

        RateRecord& rec = records[ci];
        rec.n = cell.n;
        rec.cover_size = size;
        rec.epsilon_used = cover.max_residual;
        rec.measured_error = worst;
        rec.bound_error = bound_error_at(config, cell.n);
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    std::sort(records.begin(), records.end(), [](const RateRecord& a, const RateRecord& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.epsilon_used > b.epsilon_used;
    });

    // width-certificate consistency: each record's error may not exceed the
    // certified radius (targets are exact hull members, so delta = 0), and
    // errors are nonincreasing across the nested bases
    for (const RateRecord& rec : records) {
        if (rec.measured_error > rec.epsilon_used + config.solver.tol * 10.0 + 1e-8)
            throw InvariantError("run_sweep: measured error exceeds the certified radius");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].measured_error > records[i - 1].measured_error + 1e-9)
            throw InvariantError("run_sweep: errors not monotone across nested bases");
    }
    return records;
}

RateFit fit_rate(std::span<const RateRecord> records, RateField field, double tol,
                 double theoretical_exponent) {
    std::vector<double> xs, ys;
    RateFit fit;
    fit.theoretical_exponent = theoretical_exponent;
    for (const RateRecord& rec : records) {
        const double y = field == RateField::measured_error ? rec.measured_error
                                                            : rec.epsilon_used;
        if (y <= 0.0 || y < 10.0 * tol) {
            fit.excluded.push_back(rec.n);
            continue;
        }
        xs.push_back(std::log(static_cast<double>(rec.n)));
        ys.push_back(std::log(y));
    }
    if (xs.size() < 4)
        throw std::invalid_argument("fit_rate: need at least 4 records with positive errors");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : std::max(0.0, 1.0 - ss_res / ss_tot);
    fit.points_used = xs.size();
    return fit;
}

// ---------------------------------------------------------------------------
// randomized verification of the two constructions
// ---------------------------------------------------------------------------

namespace {

std::vector<double> random_mass_coefficients(Rng& rng, std::size_t count) {
    std::vector<double> mags(count);
    double total = 0.0;
    for (double& v : mags) {
        v = -std::log(1.0 - rng.uniform());
        total += v;
    }
    double mass = rng.uniform();
    if (rng.index(4) == 0) mass = 1.0;  // exercise the boundary sum|lambda| = 1
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = rng.sign() * mass * mags[i] / total;
    return out;
}

}  // namespace

VerifyReport verify_constructions(const ExperimentConfig& config) {
    VerifyReport report;
    const std::size_t instances = config.verify.instances;

    // --- shifted-core construction -----------------------------------------
    const std::uint64_t shift_seed = derive_seed(config.seed, kShiftStream);
    std::vector<double> recon(instances), shift_excess(instances), mass_dev(instances);
    parallel_for(instances, config.jobs, [&](std::size_t i) {
        Rng rng(derive_seed(shift_seed, i));
        const std::size_t m = 1 + rng.index(config.verify.max_dim);
        const std::size_t n_atoms = 1 + rng.index(config.verify.max_atoms);

        std::vector<double> pts(m), wts(m, 1.0 / static_cast<double>(m));
        for (std::size_t q = 0; q < m; ++q) pts[q] = static_cast<double>(q);
        const DomainPtr domain = std::make_shared<GridDomain>(
            std::move(pts), 1, std::move(wts), MeasureKind::probability);
        const NormSpec spec(2.0, domain);

        std::vector<FunctionVector> basis;
        basis.reserve(n_atoms);
        for (std::size_t a = 0; a < n_atoms; ++a) {
            std::vector<double> vals(m);
            for (double& v : vals) v = rng.normal();
            basis.emplace_back(domain, std::move(vals));
        }
        const std::vector<double> coeffs = random_mass_coefficients(rng, n_atoms);
        std::vector<double> fvals(m);
        for (double& v : fvals) v = 1.5 * rng.normal();
        const FunctionVector f(domain, std::move(fvals));

        const ShiftedCoreResult core = shifted_core(f, basis, coeffs, spec);
        mass_dev[i] = std::abs(l1_mass(core.coefficients) - 1.0);
        recon[i] = lp_distance(f, combine(core.core, core.coefficients), spec);
        double excess = -std::numeric_limits<double>::infinity();
        const FunctionVector zero = FunctionVector::zero(domain);
        for (std::size_t a = 0; a < core.core.size(); ++a) {
            const FunctionVector& original = a == 0 ? zero : basis[a - 1];
            excess = std::max(excess, lp_distance(original, core.core[a], spec) - core.alpha);
        }
        shift_excess[i] = excess;
    });
    report.shift_instances = instances;
    double worst_recon = -std::numeric_limits<double>::infinity();
    double worst_shift = worst_recon, worst_mass = worst_recon;
    for (std::size_t i = 0; i < instances; ++i) {
        worst_recon = std::max(worst_recon, recon[i]);
        worst_shift = std::max(worst_shift, shift_excess[i]);
        worst_mass = std::max(worst_mass, mass_dev[i]);
        if (recon[i] <= 1e-8 && shift_excess[i] <= 1e-8 && mass_dev[i] <= 1e-8)
            ++report.shift_passes;
    }
    report.max_reconstruction_residual = worst_recon;
    report.max_shift_excess = worst_shift;
    report.max_mass_deviation = worst_mass;

    // --- collapse-onto-cover construction ----------------------------------
    const std::uint64_t collapse_seed = derive_seed(config.seed, kCollapseStream);
    std::vector<double> collapse_excess(instances), mass_increase(instances);
    std::vector<VerifyCertificate> certs(instances);
    parallel_for(instances, config.jobs, [&](std::size_t i) {
        Rng rng(derive_seed(collapse_seed, i));
        const std::size_t d = 1 + rng.index(2);
        const std::size_t count = 8 + rng.index(17);
        const std::size_t m = 4 + rng.index(13);
        const DomainPtr domain = GridDomain::monte_carlo_cube(d, m, rng.next_u64());
        const NormSpec spec(i % 3 == 0 ? 1.0 : 2.0, domain);
        const NodeFamily fam = NodeFamily::smooth_mother(d, d + 2);
        const Dictionary dict =
            sample_dictionary(fam, domain, SampleMode::random, count, rng.next_u64());

        const double spread = farthest_point_trace(dict, spec, 1).residual_after[0];
        const double eps = spread > 0.0 ? rng.uniform(0.25, 0.9) * spread : 0.1;
        const EpsCover cover = greedy_cover(dict, std::max(eps, 1e-6), spec);

        const std::size_t n_terms = 1 + rng.index(20);
        std::vector<std::size_t> idx(n_terms);
        for (auto& v : idx) v = rng.index(count);  // repeats allowed
        const std::vector<double> coeffs = random_mass_coefficients(rng, n_terms);

        std::vector<FunctionVector> used;
        used.reserve(n_terms);
        for (std::size_t q : idx) used.push_back(dict.members()[q]);
        const FunctionVector combo = combine(used, coeffs);

        double delta = 0.0;
        std::optional<FunctionVector> target;
        if (rng.index(2) == 0) {
            std::vector<double> vals = combo.values();
            for (double& v : vals) v += 0.02 * rng.normal();
            target.emplace(domain, std::move(vals));
            delta = lp_distance(*target, combo, spec);
        }

        const ApproxResult res = collapse_to_cover(dict, idx, coeffs, cover, spec,
                                                   target ? &*target : nullptr);
        collapse_excess[i] = res.error - (delta + cover.epsilon);
        mass_increase[i] = res.combination.l1_mass - l1_mass(coeffs);
        certs[i] = {cover.center_indices.size(), cover.epsilon,
                    "covering number of any convex core of the sampled hull at this radius "
                    "is at most " +
                        std::to_string(cover.center_indices.size() + 1) +
                        " (conditional: the sampled dictionary stands in for the class)"};
    });
    report.collapse_instances = instances;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_mass_up = worst_excess;
    for (std::size_t i = 0; i < instances; ++i) {
        worst_excess = std::max(worst_excess, collapse_excess[i]);
        worst_mass_up = std::max(worst_mass_up, mass_increase[i]);
        if (collapse_excess[i] <= 1e-8 && mass_increase[i] <= 1e-8) ++report.collapse_passes;
    }
    report.max_collapse_excess = worst_excess;
    report.max_mass_increase = worst_mass_up;
    // one certificate per distinct cover size keeps the report readable
    std::unordered_set<std::size_t> seen;
    for (auto& cert : certs) {
        if (seen.insert(cert.n).second) report.certificates.push_back(std::move(cert));
    }
    std::sort(report.certificates.begin(), report.certificates.end(),
              [](const VerifyCertificate& a, const VerifyCertificate& b) { return a.n < b.n; });

    report.passed = report.shift_passes == report.shift_instances &&
                    report.collapse_passes == report.collapse_instances &&
                    report.max_reconstruction_residual <= 1e-8 &&
                    report.max_collapse_excess <= 1e-8;
    return report;
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string records_to_csv(std::span<const RateRecord> records, bool include_timing) {
    std::string out = "n,epsilon_used,measured_error,bound_error,cover_size,wall_time_s\n";
    for (const RateRecord& rec : records) {
        out += std::to_string(rec.n);
        out += ',';
        out += format_double(rec.epsilon_used);
        out += ',';
        out += format_double(rec.measured_error);
        out += ',';
        out += format_double(rec.bound_error);
        out += ',';
        out += std::to_string(rec.cover_size);
        out += ',';
        out += format_double(include_timing ? rec.wall_time : 0.0);
        out += '\n';
    }
    return out;
}

std::string records_to_json(std::span<const RateRecord> records, bool include_timing) {
    json arr = json::array();
    for (const RateRecord& rec : records) {
        json row;
        row["n"] = rec.n;
        row["epsilon_used"] = rec.epsilon_used;
        row["measured_error"] = rec.measured_error;
        row["bound_error"] =
            std::isnan(rec.bound_error) ? json() : json(rec.bound_error);
        row["cover_size"] = rec.cover_size;
        row["wall_time_s"] = include_timing ? rec.wall_time : 0.0;
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

std::string records_to_svg(std::span<const RateRecord> records,
                           const std::optional<RateFit>& fit) {
    constexpr double kWidth = 640.0, kHeight = 480.0;
    constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 50.0;

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    auto consider = [&](double n, double y) {
        if (!(y > 0.0) || std::isnan(y)) return;
        min_x = std::min(min_x, std::log10(n));
        max_x = std::max(max_x, std::log10(n));
        min_y = std::min(min_y, std::log10(y));
        max_y = std::max(max_y, std::log10(y));
    };
    for (const RateRecord& rec : records) {
        consider(static_cast<double>(rec.n), rec.measured_error);
        consider(static_cast<double>(rec.n), rec.bound_error);
        consider(static_cast<double>(rec.n), rec.epsilon_used);
    }
    if (!(min_x < max_x)) max_x = min_x + 1.0;
    if (!(min_y < max_y)) {
        min_y -= 0.5;
        max_y += 0.5;
    }

    auto px = [&](double lx) {
        return kLeft + (lx - min_x) / (max_x - min_x) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double ly) {
        return kHeight - kBottom - (ly - min_y) / (max_y - min_y) * (kHeight - kTop - kBottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // decade ticks
    for (int e = static_cast<int>(std::floor(min_y)); e <= static_cast<int>(std::ceil(max_y));
         ++e) {
        if (e < min_y || e > max_y) continue;
        const double y = py(e);
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight
            << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"12\">1e" << e << "</text>\n";
    }
    for (const RateRecord& rec : records) {
        const double x = px(std::log10(static_cast<double>(rec.n)));
        svg << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
            << kHeight - kBottom << "\" stroke=\"#eee\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"12\">" << rec.n << "</text>\n";
    }

    auto polyline = [&](auto value, const char* color) {
        std::ostringstream pts;
        bool any = false;
        for (const RateRecord& rec : records) {
            const double y = value(rec);
            if (!(y > 0.0) || std::isnan(y)) continue;
            pts << px(std::log10(static_cast<double>(rec.n))) << ',' << py(std::log10(y)) << ' ';
            any = true;
        }
        if (any)
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
                << pts.str() << "\"/>\n";
    };
    polyline([](const RateRecord& r) { return r.measured_error; }, "#1f77b4");
    polyline([](const RateRecord& r) { return r.epsilon_used; }, "#2ca02c");
    polyline([](const RateRecord& r) { return r.bound_error; }, "#d62728");

    svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16
        << "\" font-size=\"12\" fill=\"#1f77b4\">measured error</text>\n";
    svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 32
        << "\" font-size=\"12\" fill=\"#2ca02c\">cover radius</text>\n";
    svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 48
        << "\" font-size=\"12\" fill=\"#d62728\">closed-form bound</text>\n";
    if (fit) {
        svg << "<text x=\"" << kWidth - kRight - 10 << "\" y=\"" << kTop + 16
            << "\" text-anchor=\"end\" font-size=\"12\">slope " << format_double(fit->slope)
            << " (theory " << format_double(fit->theoretical_exponent) << ")</text>\n";
    }
    svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">n (log scale)</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace widthlab
