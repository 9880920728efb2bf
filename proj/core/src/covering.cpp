#include "widthlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace widthlab {

namespace {

// Core farthest-point loop. Stops when the residual reaches `epsilon`
// (ignored when negative) or `max_centers` points were placed. A residual of
// exactly zero also stops: further additions would duplicate members.
FpsTrace run_fps(std::span<const FunctionVector> members, const NormSpec& spec,
                 std::size_t max_centers, double epsilon) {
    if (members.empty()) throw std::invalid_argument("farthest-point: empty dictionary");
    const std::size_t n = members.size();
    const std::size_t limit = std::min(max_centers, n);

    FpsTrace trace;
    trace.order.push_back(0);
    trace.addition_distance.push_back(std::numeric_limits<double>::infinity());

    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = lp_distance(members[i], members[0], spec);

    auto argmax = [&]() {
        std::size_t best = 0;
        double best_d = nearest[0];
        for (std::size_t i = 1; i < n; ++i)
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        return std::pair{best_d, best};
    };

    auto [maxd, maxi] = argmax();
    trace.residual_after.push_back(maxd);

    while (trace.order.size() < limit) {
        if (epsilon >= 0.0 && maxd <= epsilon) break;
        if (maxd == 0.0) break;
        trace.order.push_back(maxi);
        trace.addition_distance.push_back(maxd);
        const auto& c = members[maxi];
        for (std::size_t i = 0; i < n; ++i) {
            const double d = lp_distance(members[i], c, spec);
            if (d < nearest[i]) nearest[i] = d;
        }
        std::tie(maxd, maxi) = argmax();
        trace.residual_after.push_back(maxd);
    }
    return trace;
}

}  // namespace

FpsTrace farthest_point_trace(std::span<const FunctionVector> members, const NormSpec& spec,
                              std::size_t max_centers) {
    if (max_centers == 0)
        throw std::invalid_argument("farthest_point_trace: need at least one center");
    return run_fps(members, spec, max_centers, -1.0);
}

FpsTrace farthest_point_trace(const Dictionary& dict, const NormSpec& spec,
                              std::size_t max_centers) {
    return farthest_point_trace(std::span<const FunctionVector>(dict.members()), spec,
                                max_centers);
}

EpsCover greedy_cover(std::span<const FunctionVector> members, double epsilon,
                      const NormSpec& spec) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("greedy_cover: epsilon must be positive");
    const FpsTrace trace = run_fps(members, spec, members.size(), epsilon);
    EpsCover cover;
    cover.epsilon = epsilon;
    cover.center_indices = trace.order;
    cover.max_residual = trace.residual_after.back();
    cover.certified = cover.max_residual <= epsilon;
    return cover;
}

EpsCover greedy_cover(const Dictionary& dict, double epsilon, const NormSpec& spec) {
    return greedy_cover(std::span<const FunctionVector>(dict.members()), epsilon, spec);
}

EpsCover greedy_cover_budget(std::span<const FunctionVector> members, std::size_t max_centers,
                             const NormSpec& spec) {
    if (max_centers == 0)
        throw std::invalid_argument("greedy_cover_budget: need at least one center");
    const FpsTrace trace = run_fps(members, spec, max_centers, -1.0);
    EpsCover cover;
    cover.max_residual = trace.residual_after.back();
    cover.epsilon = cover.max_residual;
    cover.center_indices = trace.order;
    cover.certified = true;
    return cover;
}

EpsCover greedy_cover_budget(const Dictionary& dict, std::size_t max_centers,
                             const NormSpec& spec) {
    return greedy_cover_budget(std::span<const FunctionVector>(dict.members()), max_centers,
                               spec);
}

EpsPacking greedy_packing(std::span<const FunctionVector> members, double epsilon,
                          const NormSpec& spec) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("greedy_packing: epsilon must be positive");
    const FpsTrace trace = run_fps(members, spec, members.size(), epsilon);
    EpsPacking packing;
    packing.epsilon = epsilon;
    packing.point_indices = trace.order;
    double min_pair = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < trace.addition_distance.size(); ++i)
        min_pair = std::min(min_pair, trace.addition_distance[i]);
    packing.min_pairwise = min_pair;
    return packing;
}

EpsPacking greedy_packing(const Dictionary& dict, double epsilon, const NormSpec& spec) {
    return greedy_packing(std::span<const FunctionVector>(dict.members()), epsilon, spec);
}

double haussler_bound(int vc_dimension, double p, double epsilon, double k_const) {
    if (vc_dimension < 2) throw std::invalid_argument("haussler_bound: V must be >= 2");
    if (!(p >= 1.0)) throw std::invalid_argument("haussler_bound: p must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("haussler_bound: epsilon must be positive");
    if (!(k_const > 0.0)) throw std::invalid_argument("haussler_bound: K must be positive");
    const double v = static_cast<double>(vc_dimension);
    return k_const * v * std::pow(4.0 * std::numbers::e, v) *
           std::pow(1.0 / epsilon, p * (v - 1.0));
}

double lipschitz_bound(int k, double epsilon) {
    if (k < 1) throw std::invalid_argument("lipschitz_bound: k must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("lipschitz_bound: epsilon must be positive");
    return std::pow(1.0 / epsilon, static_cast<double>(k));
}

BoundReport bound_consistency(const Dictionary& dict, double epsilon, const NormSpec& spec,
                              double k_const) {
    BoundReport report;
    report.epsilon = epsilon;
    switch (dict.family().kind) {
        case NodeKind::linear_threshold: {
            const int vc = static_cast<int>(dict.family().input_dim) + 1;
            report.bound_value = haussler_bound(vc, spec.p(), epsilon, k_const);
            report.epsilon_over_lipschitz = epsilon;
            report.bound_value_scaled = report.bound_value;
            break;
        }
        case NodeKind::smooth_mother: {
            const int k = static_cast<int>(dict.family().param_count);
            const double lips = dict.family().lipschitz_constant;
            report.bound_value = lipschitz_bound(k, epsilon);
            report.epsilon_over_lipschitz = epsilon / lips;
            report.bound_value_scaled = lipschitz_bound(k, std::min(1.0, epsilon / lips));
            break;
        }
        case NodeKind::fourier_atom:
            throw std::invalid_argument("bound_consistency: no covering bound for fourier atoms");
    }
    report.empirical_size = greedy_cover(dict, epsilon, spec).center_indices.size();
    report.satisfied = static_cast<double>(report.empirical_size) <= report.bound_value;
    return report;
}

}  // namespace widthlab
