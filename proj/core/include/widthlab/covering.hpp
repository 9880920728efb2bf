#pragma once

#include <cstddef>
#include <vector>

#include "widthlab/node_classes.hpp"

namespace widthlab {

/// Witness of an internal epsilon-cover: centers are dictionary members, so
/// the size upper-bounds the sampled class's covering number (possibly at
/// twice the radius relative to covers with arbitrary centers).
struct EpsCover {
    double epsilon = 0.0;
    std::vector<std::size_t> center_indices;
    bool certified = false;
    double max_residual = 0.0;  ///< largest member-to-nearest-center distance
};

/// A subset with pairwise distances exceeding epsilon; its size lower-bounds
/// covering-type quantities through the usual packing/covering sandwich.
struct EpsPacking {
    double epsilon = 0.0;
    std::vector<std::size_t> point_indices;
    double min_pairwise = 0.0;
};

/// Farthest-point trace: order of additions and max residual after each
/// prefix. Covers for every radius and every size budget are prefixes of this
/// single ordering (the selection rule does not depend on epsilon), which is
/// also what makes sweep bases nested.
struct FpsTrace {
    std::vector<std::size_t> order;           ///< first entry is index 0
    std::vector<double> addition_distance;    ///< distance to prior centers (inf for the first)
    std::vector<double> residual_after;       ///< max residual once order[i] is placed
};

FpsTrace farthest_point_trace(std::span<const FunctionVector> members, const NormSpec& spec,
                              std::size_t max_centers);
FpsTrace farthest_point_trace(const Dictionary& dict, const NormSpec& spec,
                              std::size_t max_centers);

/// Farthest-point greedy cover: starts at index 0, repeatedly adds the member
/// farthest from the current centers (ties to the lowest index) until the
/// residual drops to epsilon. Always certified on a finite dictionary.
EpsCover greedy_cover(std::span<const FunctionVector> members, double epsilon,
                      const NormSpec& spec);
EpsCover greedy_cover(const Dictionary& dict, double epsilon, const NormSpec& spec);

/// First `max_centers` steps of the same ordering; epsilon is set to the
/// achieved residual, so the result is certified by construction.
EpsCover greedy_cover_budget(std::span<const FunctionVector> members, std::size_t max_centers,
                             const NormSpec& spec);
EpsCover greedy_cover_budget(const Dictionary& dict, std::size_t max_centers,
                             const NormSpec& spec);

/// Maximal greedy epsilon-separated subset under the same ordering and tie
/// rules. Every added point is more than epsilon from all earlier ones.
EpsPacking greedy_packing(std::span<const FunctionVector> members, double epsilon,
                          const NormSpec& spec);
EpsPacking greedy_packing(const Dictionary& dict, double epsilon, const NormSpec& spec);

/// VC-class covering bound K * V * (4e)^V * (1/eps)^(p(V-1)) for the L_p(P)
/// covering number of a class with VC dimension V (Haussler's bound). Values
/// with eps > 1 are still computed; the bound is vacuous in that regime.
double haussler_bound(int vc_dimension, double p, double epsilon, double k_const);

/// Covering bound (1/eps)^k for a class parameterized 1-Lipschitz by [0,1]^k.
double lipschitz_bound(int k, double epsilon);

/// Empirical greedy-cover size against the applicable closed-form bound.
/// linear_threshold uses the VC bound with V = d+1; smooth_mother uses the
/// Lipschitz bound. When the family's assumed Lipschitz constant L differs
/// from 1 the rescaled radius eps/L and its bound are reported alongside,
/// since the closed form is only claimed at L = 1.
struct BoundReport {
    std::size_t empirical_size = 0;
    double bound_value = 0.0;
    bool satisfied = false;
    double epsilon = 0.0;
    double epsilon_over_lipschitz = 0.0;
    double bound_value_scaled = 0.0;
};

BoundReport bound_consistency(const Dictionary& dict, double epsilon, const NormSpec& spec,
                              double k_const = 1.0);

}  // namespace widthlab
