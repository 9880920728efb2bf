#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "widthlab/function_space.hpp"

namespace widthlab {

enum class NodeKind { linear_threshold, smooth_mother, fourier_atom };

struct ParamRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Describes one parameterized family of single-node functions.
///
///  - linear_threshold(d): x -> 1[w.x + b >= 0] with (w, b) normalized to
///    ||(w,b)||_2 = 1 and the tie 1[0 >= 0] = 1.
///  - smooth_mother(d, k): x -> mother(x, y) for y in [0,1]^k; built-in
///    mothers are registered by id (see below).
///  - fourier_atom(F): the trigonometric atoms 1, sin t, cos t, ..., sin Ft,
///    cos Ft on a one-dimensional torus domain.
///
/// Built-in mother ids:
///  - "logistic": y is affinely mapped onto ridge parameters (w, b, s) and the
///    node is x -> sigma(s * (w.x + b)). Requires k in {d, d+1, d+2}: the first
///    d entries give w in [-1,1]^d, entry d+1 (if present) gives b in [-1,1],
///    entry d+2 (if present) gives s in [1,8]; missing entries default to
///    b = 0, s = 4.
///  - "constant": x -> 1/2, ignoring y.
///  - "coordinate": x -> y_1.
struct NodeFamily {
    NodeKind kind = NodeKind::linear_threshold;
    std::size_t input_dim = 1;                ///< d
    std::size_t param_count = 0;              ///< k (smooth_mother); d+1 for thresholds
    double lipschitz_constant = 1.0;          ///< assumed constant of the parameterization
    std::string mother_id = "logistic";
    std::size_t max_frequency = 0;            ///< fourier_atom only
    std::vector<ParamRange> parameter_box;    ///< one range per parameter

    static NodeFamily linear_threshold(std::size_t d, std::vector<ParamRange> box = {});
    static NodeFamily smooth_mother(std::size_t d, std::size_t k, double lipschitz_constant = 1.0,
                                    std::string mother = "logistic");
    static NodeFamily fourier_atom(std::size_t max_frequency);
};

enum class SampleMode { grid, random };

/// A finite sampled dictionary: parameter vectors plus their evaluations on a
/// fixed domain, all scaled by a positive factor Lambda. Members are a pure
/// function of (family, parameters, domain, scale), which is what makes the
/// JSON round-trip below lossless without storing values.
class Dictionary {
  public:
    Dictionary(NodeFamily family, DomainPtr domain, SampleMode mode,
               std::vector<std::vector<double>> parameters, double scale, std::uint64_t seed);

    const NodeFamily& family() const noexcept { return family_; }
    const DomainPtr& domain() const noexcept { return domain_; }
    SampleMode mode() const noexcept { return mode_; }
    const std::vector<std::vector<double>>& parameters() const noexcept { return parameters_; }
    const std::vector<FunctionVector>& members() const noexcept { return members_; }
    double scale() const noexcept { return scale_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size() const noexcept { return members_.size(); }

  private:
    NodeFamily family_;
    DomainPtr domain_;
    SampleMode mode_;
    std::vector<std::vector<double>> parameters_;
    std::vector<FunctionVector> members_;
    double scale_;
    std::uint64_t seed_;
};

/// Evaluates one node of the family at every domain point, scaled by `scale`.
/// For linear_threshold the parameter vector is (w, b) prior to normalization.
FunctionVector evaluate_node(const NodeFamily& family, std::span<const double> params,
                             const DomainPtr& domain, double scale);

/// Draws a dictionary. `count_or_resolution` is the member count in random
/// mode and the per-axis lattice resolution in grid mode (degenerate ranges
/// contribute a single lattice value). fourier_atom families ignore the mode
/// and enumerate all 2F+1 atoms. Deterministic given the seed.
Dictionary sample_dictionary(const NodeFamily& family, const DomainPtr& domain, SampleMode mode,
                             std::size_t count_or_resolution, std::uint64_t seed,
                             double scale = 1.0);

/// Empirical Lipschitz ratio of the parameterization: max over sampled member
/// pairs of ||f(.,y) - f(.,y')|| / ||y - y'||_2, computed on unscaled values.
/// smooth_mother families only.
double lipschitz_check(const Dictionary& dict, const NormSpec& spec, std::size_t trials,
                       std::uint64_t seed);

/// Serialization: family descriptor, mode, seed, scale and the parameter list.
/// Members are re-evaluated on load against the supplied domain.
std::string dictionary_to_json(const Dictionary& dict);
Dictionary dictionary_from_json(const std::string& text, const DomainPtr& domain);

}  // namespace widthlab
