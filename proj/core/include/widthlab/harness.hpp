#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "widthlab/convex_approx.hpp"
#include "widthlab/covering.hpp"
#include "widthlab/node_classes.hpp"
#include "widthlab/sobolev.hpp"

namespace widthlab {

// ---------------------------------------------------------------------------
// experiment configuration
// ---------------------------------------------------------------------------

struct DomainConfig {
    std::string type = "monte_carlo";  ///< "torus" | "monte_carlo"
    std::size_t size = 2000;
    std::size_t dim = 1;               ///< monte_carlo only
};

struct ClassConfig {
    std::string kind;                  ///< node family kind or "sobolev"
    std::size_t input_dim = 1;
    std::size_t param_count = 0;
    double lipschitz_constant = 1.0;
    std::string mother_id = "logistic";
    std::size_t max_frequency = 0;
    std::vector<ParamRange> parameter_box;  ///< optional override
    int r = 1;                         ///< sobolev
    double C = 7.0;                    ///< sobolev

    bool is_sobolev() const { return kind == "sobolev"; }
    NodeFamily node_family() const;
};

struct DictionaryConfig {
    SampleMode mode = SampleMode::random;
    std::size_t count = 200;        ///< random mode
    std::size_t resolution = 8;     ///< grid mode, per axis
    double scale = 1.0;
};

struct SolverConfig {
    double tol = 1e-9;
    int max_iter = 200;
    std::size_t trials = 32;
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "csv";        ///< "csv" | "json"
    bool include_timing = false;       ///< real wall times break byte-determinism
    bool svg = false;
};

struct SobolevConfig {
    double lambda = 0.0;               ///< 0 = derive the adequate value
    std::size_t truncation = 256;      ///< representation cutoff
    std::size_t series_truncation = 10000;  ///< extremal-mass series cutoff
};

struct VerifyConfig {
    std::size_t instances = 1000;
    std::size_t max_dim = 64;
    std::size_t max_atoms = 16;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    int jobs = 1;
    double p = 2.0;
    ClassConfig klass;
    DomainConfig domain;
    DictionaryConfig dictionary;
    std::vector<std::size_t> sweep_n;
    std::vector<double> sweep_epsilon;
    SolverConfig solver;
    double k_const = 1.0;
    SobolevConfig sobolev;
    VerifyConfig verify;
    OutputConfig output;

    DomainPtr build_domain() const;
    Dictionary build_dictionary(const DomainPtr& domain) const;
};

/// Parses and validates a config document. Unknown keys anywhere are
/// rejected; `seed` is mandatory; sweeps must be strictly increasing.
ExperimentConfig parse_config(const std::string& json_text);

// ---------------------------------------------------------------------------
// sweep records and rate fits
// ---------------------------------------------------------------------------

struct RateRecord {
    std::size_t n = 0;
    double epsilon_used = 0.0;
    double measured_error = 0.0;
    double bound_error = 0.0;
    std::size_t cover_size = 0;
    double wall_time = 0.0;   ///< seconds; written to CSV only when timing is on
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theoretical_exponent = 0.0;
    std::size_t points_used = 0;
    std::vector<std::size_t> excluded;  ///< n values dropped (zero or plateau errors)
};

enum class RateField { measured_error, epsilon_used };

/// For each n: take the first n members of the farthest-point ordering as the
/// basis (nested across the sweep), record the achieved cover radius, and
/// measure the worst constrained-fit error over random mass-bounded
/// combinations of dictionary members. Every target's collapse onto the cover
/// seeds the solver, so each record obeys measured_error <= epsilon_used up
/// to solver rounding; that inequality and the monotonicity of errors across
/// the nested bases are checked before returning.
std::vector<RateRecord> run_sweep(const ExperimentConfig& config);

/// Ordinary least squares of log(field) on log(n). Records with zero error
/// are excluded with a note, as is the plateau where the solver tolerance
/// dominates (field < 10 * tol). At least four usable points are required.
RateFit fit_rate(std::span<const RateRecord> records, RateField field, double tol,
                 double theoretical_exponent);

/// Inverts the applicable covering bound to error-at-n form for the family;
/// NaN when no closed form applies.
double bound_error_at(const ExperimentConfig& config, std::size_t n);

// ---------------------------------------------------------------------------
// randomized construction verification
// ---------------------------------------------------------------------------

struct VerifyCertificate {
    std::size_t n = 0;       ///< cover size achieving the width bound
    double epsilon = 0.0;
    std::string statement;   ///< conditional covering-number implication
};

struct VerifyReport {
    std::size_t shift_instances = 0;
    std::size_t shift_passes = 0;
    double max_reconstruction_residual = 0.0;
    double max_shift_excess = 0.0;        ///< max ||phi - phi'|| - alpha
    double max_mass_deviation = 0.0;      ///< max |sum|lambda| - 1|
    std::size_t collapse_instances = 0;
    std::size_t collapse_passes = 0;
    double max_collapse_excess = 0.0;     ///< max error - (delta + epsilon)
    double max_mass_increase = 0.0;
    std::vector<VerifyCertificate> certificates;
    bool passed = false;
};

/// Runs both width-certificate constructions on randomized instances and
/// aggregates pass/fail. All residuals are required to stay below 1e-8.
VerifyReport verify_constructions(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

/// CSV with the mandatory header; floats printed with 9 significant digits.
/// Wall times are emitted as 0 unless include_timing is set, keeping default
/// output byte-identical across runs and job counts.
std::string records_to_csv(std::span<const RateRecord> records, bool include_timing);

std::string records_to_json(std::span<const RateRecord> records, bool include_timing);

/// Standalone log-log SVG plot of measured and bound errors against n.
std::string records_to_svg(std::span<const RateRecord> records,
                           const std::optional<RateFit>& fit);

}  // namespace widthlab
