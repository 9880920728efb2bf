#include "widthlab/function_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace widthlab {

namespace {

constexpr double kProbabilityTol = 1e-12;

void check_weights(const std::vector<double>& weights, std::size_t n_points, MeasureKind kind) {
    if (weights.size() != n_points)
        throw std::invalid_argument("GridDomain: weights/points length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("GridDomain: weights must be finite and nonnegative");
        total += w;
    }
    if (kind == MeasureKind::probability && std::abs(total - 1.0) > kProbabilityTol)
        throw std::invalid_argument("GridDomain: probability weights must sum to 1");
}

}  // namespace

GridDomain::GridDomain(std::vector<double> points_flat, std::size_t dim,
                       std::vector<double> weights, MeasureKind kind, std::uint64_t seed)
    : points_(std::move(points_flat)), dim_(dim), weights_(std::move(weights)), kind_(kind),
      seed_(seed) {
    if (dim_ == 0) throw std::invalid_argument("GridDomain: dimension must be positive");
    if (points_.size() % dim_ != 0)
        throw std::invalid_argument("GridDomain: flat point array not divisible by dim");
    check_weights(weights_, points_.size() / dim_, kind_);
}

std::shared_ptr<const GridDomain> GridDomain::torus(std::size_t m) {
    if (m == 0) throw std::invalid_argument("GridDomain::torus: empty grid");
    std::vector<double> pts(m);
    const double h = 2.0 * std::numbers::pi / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = h * static_cast<double>(i);
    std::vector<double> w(m, h);
    return std::make_shared<GridDomain>(std::move(pts), 1, std::move(w), MeasureKind::lebesgue);
}

std::shared_ptr<const GridDomain> GridDomain::monte_carlo_cube(std::size_t dim, std::size_t m,
                                                               std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("GridDomain::monte_carlo_cube: empty sample");
    if (dim == 0) throw std::invalid_argument("GridDomain::monte_carlo_cube: dim must be >= 1");
    Rng rng(seed);
    std::vector<double> pts(dim * m);
    for (double& x : pts) x = rng.uniform(-1.0, 1.0);
    std::vector<double> w(m, 1.0 / static_cast<double>(m));
    return std::make_shared<GridDomain>(std::move(pts), dim, std::move(w),
                                        MeasureKind::probability, seed);
}

bool compatible_domains(const DomainPtr& a, const DomainPtr& b) {
    if (!a || !b) return false;
    if (a.get() == b.get()) return true;
    return a->size() == b->size() && a->dim() == b->dim() &&
           a->measure_kind() == b->measure_kind();
}

NormSpec::NormSpec(double p, DomainPtr domain) : p_(p), domain_(std::move(domain)) {
    if (!(p_ >= 1.0) || !std::isfinite(p_))
        throw std::invalid_argument("NormSpec: p must be finite and >= 1");
    if (!domain_) throw std::invalid_argument("NormSpec: null domain");
}

FunctionVector::FunctionVector(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (!domain_) throw std::invalid_argument("FunctionVector: null domain");
    if (values_.size() != domain_->size())
        throw std::invalid_argument("FunctionVector: values/domain length mismatch");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("FunctionVector: non-finite value");
}

FunctionVector FunctionVector::zero(DomainPtr domain) {
    if (!domain) throw std::invalid_argument("FunctionVector::zero: null domain");
    std::vector<double> v(domain->size(), 0.0);
    return FunctionVector(std::move(domain), std::move(v));
}

namespace {

double accumulate_lp(const double* a, const double* b, const double* w, std::size_t n, double p) {
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = b ? a[i] - b[i] : a[i];
            acc += w[i] * d * d;
        }
        return std::sqrt(acc);
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = b ? a[i] - b[i] : a[i];
            acc += w[i] * std::abs(d);
        }
        return acc;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double d = b ? a[i] - b[i] : a[i];
        acc += w[i] * std::pow(std::abs(d), p);
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace

double norm(const FunctionVector& f, const NormSpec& spec) {
    if (!compatible_domains(f.domain(), spec.domain()))
        throw std::invalid_argument("norm: function and norm live on different domains");
    const auto& w = spec.domain()->weights();
    return accumulate_lp(f.values().data(), nullptr, w.data(), f.size(), spec.p());
}

double lp_distance(const FunctionVector& a, const FunctionVector& b, const NormSpec& spec) {
    if (!compatible_domains(a.domain(), b.domain()) ||
        !compatible_domains(a.domain(), spec.domain()))
        throw std::invalid_argument("lp_distance: domain mismatch");
    const auto& w = spec.domain()->weights();
    return accumulate_lp(a.values().data(), b.values().data(), w.data(), a.size(), spec.p());
}

std::pair<double, std::size_t> dist_to_set(const FunctionVector& f,
                                           std::span<const FunctionVector> set,
                                           const NormSpec& spec) {
    if (set.empty()) throw std::invalid_argument("dist_to_set: empty set");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double d = lp_distance(f, set[i], spec);
        if (d < best) {
            best = d;
            best_idx = i;
        }
    }
    return {best, best_idx};
}

FunctionVector combine(std::span<const FunctionVector> dict, std::span<const double> coeffs) {
    if (dict.size() != coeffs.size())
        throw std::invalid_argument("combine: dictionary/coefficients length mismatch");
    if (dict.empty()) throw std::invalid_argument("combine: empty combination");
    const DomainPtr& dom = dict.front().domain();
    std::vector<double> out(dom->size(), 0.0);
    for (std::size_t i = 0; i < dict.size(); ++i) {
        if (!compatible_domains(dict[i].domain(), dom))
            throw std::invalid_argument("combine: members on different domains");
        const double c = coeffs[i];
        if (c == 0.0) continue;
        const auto& v = dict[i].values();
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * v[j];
    }
    return FunctionVector(dom, std::move(out));
}

}  // namespace widthlab
