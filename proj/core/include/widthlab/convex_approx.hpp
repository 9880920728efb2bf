#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "widthlab/covering.hpp"
#include "widthlab/function_space.hpp"

namespace widthlab {

/// Signed combination over a dictionary with total coefficient mass
/// sum|lambda_i| <= 1 (the absolutely convex hull; signs are allowed).
struct ConvexCombination {
    std::vector<std::size_t> indices;    ///< distinct
    std::vector<double> coefficients;    ///< same length as indices
    double l1_mass = 0.0;
};

double l1_mass(std::span<const double> coefficients);

struct ApproxResult {
    ConvexCombination combination;
    double error = 0.0;      ///< residual norm, recomputed from the final combination
    int iterations = 0;
    bool converged = false;
    std::vector<double> error_trace;  ///< per-iteration errors when requested
};

struct SolverOptions {
    double tol = 1e-9;     ///< stop when one iteration improves the error by less
    int max_iter = 200;
    bool record_trace = false;
};

/// Best approximation of f by combinations sum lambda_i phi_i with
/// sum|lambda_i| <= 1 over at most n_budget distinct atoms.
///
/// Conditional-gradient over the symmetrized atom set {+-phi_i}: each step
/// picks the signed atom best aligned with the residual, takes an exact line
/// search step (p = 2) and then re-fits all active coefficients by an
/// l1-ball-constrained least squares solve. For p != 2 the alignment uses the
/// subgradient of the residual norm and the classic 2/(t+2) step, halved until
/// the objective does not increase. The objective is nonincreasing across
/// iterations in both regimes.
///
/// warm_start, when given, seeds the active set; its mass must already be
/// feasible.
ApproxResult convex_fit(const FunctionVector& f, std::span<const FunctionVector> basis,
                        std::size_t n_budget, const NormSpec& spec,
                        const SolverOptions& options = {},
                        const ConvexCombination* warm_start = nullptr);

/// Unconstrained least-squares projection onto span(basis); p = 2 only.
/// Coefficients are reported with their l1 mass but not constrained.
ApproxResult linear_fit(const FunctionVector& f, std::span<const FunctionVector> basis,
                        const NormSpec& spec);

/// Output of shifted_core: an (n+1)-element set whose absolutely convex
/// combination reproduces f exactly.
struct ShiftedCoreResult {
    std::vector<FunctionVector> core;   ///< n+1 elements; entry 0 derives from the zero element
    std::vector<double> coefficients;   ///< n+1 entries summing to 1 in absolute value
    double alpha;                       ///< residual norm of the input combination
};

/// Exactness-by-shifting construction. Given a combination sum lambda_i phi_i
/// with sum|lambda_i| <= 1 approximating f with residual r = f - sum lambda_i
/// phi_i, prepend the zero element with coefficient lambda_0 = 1 - sum|lambda_i|
/// and shift every element by its coefficient sign:
///
///     phi'_i = phi_i + sign(lambda_i) * r        (sign(0) := 0)
///
/// Then sum_{i=0..n} |lambda_i| = 1, every shift distance equals the residual
/// norm alpha, and sum_{i=0..n} lambda_i phi'_i = f exactly (an algebraic
/// identity, so the numerical residual is at rounding level).
ShiftedCoreResult shifted_core(const FunctionVector& f, std::span<const FunctionVector> basis,
                               std::span<const double> coeffs, const NormSpec& spec);

/// Collapse-onto-cover construction. Re-expresses a combination of dictionary
/// members over the centers of a certified cover: each member is mapped to its
/// nearest center (ties to the earliest center) and coefficients are summed
/// per center. With delta the residual of the input combination against the
/// target, the collapsed error is at most delta + cover.epsilon and the
/// coefficient mass never increases; both facts are checked numerically here
/// and violations raise InvariantError.
///
/// When target is null, the exact combination itself is the target (delta = 0).
ApproxResult collapse_to_cover(std::span<const FunctionVector> members,
                               std::span<const std::size_t> member_indices,
                               std::span<const double> coeffs, const EpsCover& cover,
                               const NormSpec& spec, const FunctionVector* target = nullptr);
ApproxResult collapse_to_cover(const Dictionary& dict, std::span<const std::size_t> member_indices,
                               std::span<const double> coeffs, const EpsCover& cover,
                               const NormSpec& spec, const FunctionVector* target = nullptr);

/// Max over sampled class members of the convex_fit error with at most n
/// atoms from `basis`. Per-trial seeds derive from (seed, trial index), so the
/// estimate is independent of evaluation order.
double width_upper_estimate(const std::function<FunctionVector(Rng&)>& class_sampler,
                            std::span<const FunctionVector> basis, std::size_t n,
                            const NormSpec& spec, std::size_t trials, std::uint64_t seed,
                            const SolverOptions& options = {});

}  // namespace widthlab
