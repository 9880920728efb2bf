#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "widthlab/common.hpp"

namespace widthlab {

enum class MeasureKind { probability, lebesgue };

/// A weighted point set standing in for the domain of integration: every norm
/// in the library is a finite weighted sum over these points. Immutable after
/// construction and shared by const pointer.
class GridDomain {
  public:
    /// points_flat holds `size * dim` coordinates, point-major.
    GridDomain(std::vector<double> points_flat, std::size_t dim, std::vector<double> weights,
               MeasureKind kind, std::uint64_t seed = 0);

    /// Uniform grid on [0, 2pi) with equal Lebesgue weights 2pi/m. With this
    /// normalization trigonometric constants (e.g. ||sin||_2 = sqrt(pi)) come
    /// out exactly.
    static std::shared_ptr<const GridDomain> torus(std::size_t m);

    /// m i.i.d. uniform samples from [-1,1]^dim with probability weights 1/m.
    /// The seed is recorded so the domain is reproducible.
    static std::shared_ptr<const GridDomain> monte_carlo_cube(std::size_t dim, std::size_t m,
                                                              std::uint64_t seed);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * dim_, dim_};
    }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }
    MeasureKind measure_kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }

  private:
    std::vector<double> points_;
    std::size_t dim_;
    std::vector<double> weights_;
    MeasureKind kind_;
    std::uint64_t seed_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// True when two domain handles may be mixed in one operation: either the
/// same object or structurally alike (size, dimension, measure kind).
bool compatible_domains(const DomainPtr& a, const DomainPtr& b);

/// Which L_p(P) norm to use, p in [1, inf). p = inf is not supported.
class NormSpec {
  public:
    NormSpec(double p, DomainPtr domain);
    double p() const noexcept { return p_; }
    const DomainPtr& domain() const noexcept { return domain_; }

  private:
    double p_;
    DomainPtr domain_;
};

/// A function sampled on a GridDomain; the element type of the ambient space.
/// Values are validated finite at construction and immutable afterwards.
class FunctionVector {
  public:
    FunctionVector(DomainPtr domain, std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    const DomainPtr& domain() const noexcept { return domain_; }

    static FunctionVector zero(DomainPtr domain);

  private:
    DomainPtr domain_;
    std::vector<double> values_;
};

/// Weighted l_p quadrature norm (sum_i w_i |f_i|^p)^(1/p).
double norm(const FunctionVector& f, const NormSpec& spec);

/// Distance between two functions in the same space, without allocating.
double lp_distance(const FunctionVector& a, const FunctionVector& b, const NormSpec& spec);

/// min_{s in set} ||f - s|| and the argmin index; ties go to the lowest index.
std::pair<double, std::size_t> dist_to_set(const FunctionVector& f,
                                           std::span<const FunctionVector> set,
                                           const NormSpec& spec);

/// Pointwise sum_i coeffs[i] * dict[i]. Lengths must match and all members
/// must share a domain.
FunctionVector combine(std::span<const FunctionVector> dict, std::span<const double> coeffs);

}  // namespace widthlab
