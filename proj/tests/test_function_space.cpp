#include <doctest.h>

#include <cmath>
#include <numbers>

#include "widthlab/function_space.hpp"

using namespace widthlab;

namespace {

DomainPtr flat_domain(std::vector<double> weights, MeasureKind kind) {
    std::vector<double> pts(weights.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<double>(i);
    return std::make_shared<GridDomain>(std::move(pts), 1, std::move(weights), kind);
}

FunctionVector fv(const DomainPtr& d, std::vector<double> values) {
    return FunctionVector(d, std::move(values));
}

}  // namespace

TEST_SUITE("function_space") {

TEST_CASE("norm of the constant one function under a probability measure is 1") {
    const auto d = flat_domain({0.25, 0.25, 0.25, 0.25}, MeasureKind::probability);
    const NormSpec spec(2.0, d);
    CHECK(norm(fv(d, {1, 1, 1, 1}), spec) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("norm of sin on a 4096-point torus grid is sqrt(pi)") {
    const auto d = GridDomain::torus(4096);
    std::vector<double> values(d->size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(d->point(i)[0]);
    const NormSpec spec(2.0, d);
    CHECK(std::abs(norm(fv(d, values), spec) - std::sqrt(std::numbers::pi)) < 1e-6);
}

TEST_CASE("norm of the zero function is 0") {
    const auto d = flat_domain({0.5, 0.5}, MeasureKind::probability);
    CHECK(norm(FunctionVector::zero(d), NormSpec(2.0, d)) == 0.0);
}

TEST_CASE("norm vanishes iff the function is zero wherever the weight is positive") {
    const auto d = flat_domain({0.5, 0.5, 0.0}, MeasureKind::probability);
    const NormSpec spec(2.0, d);
    CHECK(norm(fv(d, {0, 0, 5}), spec) == 0.0);
    CHECK(norm(fv(d, {0, 1e-8, 0}), spec) > 0.0);
}

TEST_CASE("construction rejects non-finite values and mismatched lengths") {
    const auto d = flat_domain({0.5, 0.5}, MeasureKind::probability);
    CHECK_THROWS_AS(fv(d, {1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(fv(d, {1.0}), std::invalid_argument);
}

TEST_CASE("norm rejects a function from a different domain") {
    const auto d2 = flat_domain({0.5, 0.5}, MeasureKind::probability);
    const auto d3 = flat_domain({0.25, 0.25, 0.5}, MeasureKind::probability);
    CHECK_THROWS_AS(norm(fv(d3, {1, 1, 1}), NormSpec(2.0, d2)), std::invalid_argument);
}

TEST_CASE("probability weights must sum to one") {
    CHECK_THROWS_AS(flat_domain({0.5, 0.4}, MeasureKind::probability), std::invalid_argument);
    CHECK_NOTHROW(flat_domain({0.5, 0.4}, MeasureKind::lebesgue));
    CHECK_THROWS_AS(flat_domain({0.5, -0.5}, MeasureKind::lebesgue), std::invalid_argument);
}

TEST_CASE("dist_to_set returns the member distance and argmin") {
    const auto d = flat_domain({1.0, 1.0}, MeasureKind::lebesgue);
    const std::vector<FunctionVector> set{fv(d, {0, 0}), fv(d, {0.5, 0})};
    const NormSpec spec(2.0, d);

    SUBCASE("a member has distance zero at its own index") {
        const auto [dist, idx] = dist_to_set(set[1], set, spec);
        CHECK(dist == 0.0);
        CHECK(idx == 1);
    }
    SUBCASE("hand-computed two-member case") {
        const auto [dist, idx] = dist_to_set(fv(d, {1, 0}), set, spec);
        CHECK(dist == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(idx == 1);
    }
    SUBCASE("ties resolve to the lowest index") {
        const std::vector<FunctionVector> sym{fv(d, {1, 0}), fv(d, {-1, 0})};
        const auto [dist, idx] = dist_to_set(fv(d, {0, 0}), sym, spec);
        CHECK(dist == doctest::Approx(1.0));
        CHECK(idx == 0);
    }
    SUBCASE("empty set is rejected") {
        CHECK_THROWS_AS(dist_to_set(set[0], std::span<const FunctionVector>{}, spec),
                        std::invalid_argument);
    }
}

TEST_CASE("combine performs the pointwise weighted sum") {
    const auto d = flat_domain({0.5, 0.5}, MeasureKind::probability);
    const std::vector<FunctionVector> dict{fv(d, {0.1, 0.0}), fv(d, {0.9, 1.0})};

    SUBCASE("a single unit coefficient reproduces the member") {
        const auto g = combine(std::span(dict).first(1), std::vector<double>{1.0});
        CHECK(g[0] == 0.1);
        CHECK(g[1] == 0.0);
    }
    SUBCASE("half/half average") {
        const auto g = combine(dict, std::vector<double>{0.5, 0.5});
        CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("all zero coefficients give the zero function") {
        const auto g = combine(dict, std::vector<double>{0.0, 0.0});
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 0.0);
    }
    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(combine(dict, std::vector<double>{1.0}), std::invalid_argument);
    }
}

TEST_CASE("norm axioms hold on random triples") {
    Rng rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng.index(32);
        std::vector<double> w(m);
        double total = 0.0;
        for (double& x : w) {
            x = rng.uniform(0.0, 1.0);
            total += x;
        }
        for (double& x : w) x /= total > 0 ? total : 1.0;
        // rounding can leave the sum off by an ulp; renormalize exactly
        double s2 = 0.0;
        for (double x : w) s2 += x;
        w[0] += 1.0 - s2;
        const auto d = flat_domain(w, MeasureKind::probability);
        const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : 3.0);
        const NormSpec spec(p, d);

        std::vector<double> a(m), b(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        const FunctionVector f(d, a), g(d, b);
        std::vector<double> sum(m);
        for (std::size_t i = 0; i < m; ++i) sum[i] = a[i] + b[i];

        CHECK(norm(FunctionVector(d, sum), spec) <= norm(f, spec) + norm(g, spec) + 1e-10);

        const double c = rng.uniform(-3.0, 3.0);
        std::vector<double> scaled(m);
        for (std::size_t i = 0; i < m; ++i) scaled[i] = c * a[i];
        CHECK(std::abs(norm(FunctionVector(d, scaled), spec) - std::abs(c) * norm(f, spec)) <
              1e-10);
    }
}

TEST_CASE("torus quadrature converges at second order or better for smooth functions") {
    const auto reference = [](std::size_t m) {
        const auto d = GridDomain::torus(m);
        std::vector<double> values(m);
        for (std::size_t i = 0; i < m; ++i) values[i] = std::exp(std::sin(d->point(i)[0]));
        return norm(FunctionVector(d, values), NormSpec(2.0, d));
    };
    const double exact = reference(4096);
    const double e4 = std::abs(reference(4) - exact);
    const double e8 = std::abs(reference(8) - exact);
    const double e16 = std::abs(reference(16) - exact);
    CHECK(e8 <= e4 / 4.0 + 1e-12);
    CHECK(e16 <= e8 / 4.0 + 1e-12);
}

TEST_CASE("dist_to_set never beats an explicitly checked member") {
    Rng rng(7);
    const auto d = flat_domain({0.2, 0.3, 0.5}, MeasureKind::probability);
    const NormSpec spec(2.0, d);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FunctionVector> set;
        for (int k = 0; k < 5; ++k)
            set.push_back(fv(d, {rng.normal(), rng.normal(), rng.normal()}));
        const FunctionVector f = fv(d, {rng.normal(), rng.normal(), rng.normal()});
        const auto [best, idx] = dist_to_set(f, set, spec);
        for (const auto& s : set) CHECK(best <= lp_distance(f, s, spec) + 1e-15);
        CHECK(best == lp_distance(f, set[idx], spec));
    }
}

}  // TEST_SUITE
