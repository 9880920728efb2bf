#include "widthlab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "widthlab/node_classes.hpp"

namespace widthlab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Trigonometric atoms in the order 1, sin t, cos t, sin 2t, cos 2t, ...
std::vector<FunctionVector> trig_atoms(const DomainPtr& domain, std::size_t count,
                                       double scale = 1.0) {
    const NodeFamily fam = NodeFamily::fourier_atom((count + 1) / 2);
    std::vector<FunctionVector> atoms;
    atoms.reserve(count);
    atoms.push_back(evaluate_node(fam, std::vector<double>{0.0, 0.0}, domain, scale));
    for (std::size_t k = 1; atoms.size() < count; ++k) {
        atoms.push_back(
            evaluate_node(fam, std::vector<double>{static_cast<double>(k), 1.0}, domain, scale));
        if (atoms.size() < count)
            atoms.push_back(evaluate_node(fam, std::vector<double>{static_cast<double>(k), 2.0},
                                          domain, scale));
    }
    return atoms;
}

}  // namespace

FunctionVector FourierFunction::evaluate(const DomainPtr& domain) const {
    if (!domain || domain->dim() != 1)
        throw std::invalid_argument("FourierFunction: evaluation needs a 1-d domain");
    if (cos_coeffs.size() != sin_coeffs.size())
        throw std::invalid_argument("FourierFunction: ragged coefficient arrays");
    const std::size_t m = domain->size();
    std::vector<double> values(m, a0);
    for (std::size_t k = 1; k <= cos_coeffs.size(); ++k) {
        const double a = cos_coeffs[k - 1];
        const double b = sin_coeffs[k - 1];
        if (a == 0.0 && b == 0.0) continue;
        const double freq = static_cast<double>(k);
        for (std::size_t i = 0; i < m; ++i) {
            const double t = domain->point(i)[0];
            values[i] += a * std::cos(freq * t) + b * std::sin(freq * t);
        }
    }
    return FunctionVector(domain, std::move(values));
}

double FourierFunction::l2_norm() const {
    double acc = 2.0 * kPi * a0 * a0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        acc += kPi * (cos_coeffs[k] * cos_coeffs[k] + sin_coeffs[k] * sin_coeffs[k]);
    return std::sqrt(acc);
}

double FourierFunction::coefficient_l1_mass() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
        acc += std::abs(cos_coeffs[k]) + std::abs(sin_coeffs[k]);
    return acc;
}

SobolevBallSpec::SobolevBallSpec(int r_, double C_) : r(r_), C(C_) {
    if (r < 1) throw std::invalid_argument("SobolevBallSpec: r must be >= 1");
    if (!(C > 2.0 * kPi)) throw std::invalid_argument("SobolevBallSpec: C must exceed 2 pi");
}

double sobolev_seminorm(const FourierFunction& f, int r) {
    if (r < 1) throw std::invalid_argument("sobolev_seminorm: r must be >= 1");
    double acc = 0.0;
    // accumulate from the high-frequency tail up so small terms are not lost
    for (std::size_t k = f.cos_coeffs.size(); k >= 1; --k) {
        const double kr = std::pow(static_cast<double>(k), static_cast<double>(r));
        const double a = f.cos_coeffs[k - 1];
        const double b = f.sin_coeffs[k - 1];
        acc += kr * kr * (a * a + b * b);
    }
    return std::sqrt(kPi * acc);
}

bool ball_membership(const FourierFunction& f, const SobolevBallSpec& spec, double tol) {
    const double seminorm = sobolev_seminorm(f, spec.r);
    const double mean_bound = std::abs(2.0 * kPi * f.a0);
    return seminorm <= 1.0 + tol && mean_bound <= spec.C + tol;
}

TruncationWidth truncation_width(const SobolevBallSpec& spec, int n, std::size_t grid_points) {
    if (n < 1) throw std::invalid_argument("truncation_width: n must be >= 1");
    TruncationWidth out;
    const double nr = std::pow(static_cast<double>(n), static_cast<double>(spec.r));
    out.analytic_error = 1.0 / nr;

    // worst case: sin(nt) / (sqrt(pi) n^r), seminorm exactly 1
    out.worst_case.cos_coeffs.assign(static_cast<std::size_t>(n), 0.0);
    out.worst_case.sin_coeffs.assign(static_cast<std::size_t>(n), 0.0);
    out.worst_case.sin_coeffs[static_cast<std::size_t>(n) - 1] = 1.0 / (std::sqrt(kPi) * nr);

    // coefficient-space projection onto {1, sin kt, cos kt : k < n} removes
    // every frequency below n; the residual is the sin(nt) term alone
    out.coefficient_error =
        std::sqrt(kPi) * std::abs(out.worst_case.sin_coeffs[static_cast<std::size_t>(n) - 1]);

    // quadrature cross-check on the grid
    const DomainPtr domain = GridDomain::torus(grid_points);
    const NormSpec spec2(2.0, domain);
    const std::vector<FunctionVector> atoms =
        trig_atoms(domain, 2 * static_cast<std::size_t>(n) - 1);
    const FunctionVector target = out.worst_case.evaluate(domain);
    out.quadrature_error = linear_fit(target, atoms, spec2).error;
    return out;
}

namespace {

/// Projected-gradient ascent for max sum(x_i) over the ellipsoid
/// sum d_i x_i^2 <= 1, run in whitened coordinates z_i = sqrt(d_i) x_i where
/// the feasible set is the Euclidean unit ball and projection is radial.
/// Deliberately ignorant of the closed-form stationarity rule.
double ellipsoid_linear_max_pga(const std::vector<double>& d, int max_iter, double tol) {
    const std::size_t n = d.size();
    std::vector<double> dir(n);  // objective gradient in whitened coordinates
    for (std::size_t i = 0; i < n; ++i) dir[i] = 1.0 / std::sqrt(d[i]);
    double dir_norm = 0.0;
    for (double v : dir) dir_norm += v * v;
    dir_norm = std::sqrt(dir_norm);
    const double step = 1.0 / dir_norm;

    std::vector<double> z(n, 0.0);
    double value = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] += step * dir[i];
            nrm += z[i] * z[i];
        }
        nrm = std::sqrt(nrm);
        if (nrm > 1.0)
            for (double& v : z) v /= nrm;
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) next += dir[i] * z[i];
        if (std::abs(next - value) <= tol * std::max(1.0, std::abs(next))) {
            value = next;
            break;
        }
        value = next;
    }
    return value;
}

}  // namespace

FourierFunction ExtremalMass::rule_function(std::size_t terms) const {
    FourierFunction f;
    f.cos_coeffs.resize(terms);
    f.sin_coeffs.resize(terms);
    for (std::size_t k = 1; k <= terms; ++k) {
        const double c = rule_scale / (static_cast<double>(k) * static_cast<double>(k));
        f.cos_coeffs[k - 1] = c;
        f.sin_coeffs[k - 1] = c;
    }
    return f;
}

ExtremalMass extremal_l1_mass(int r, std::size_t truncation) {
    if (r != 1)
        throw std::invalid_argument(
            "extremal_l1_mass: only r = 1 is supported (the maximizing case)");
    if (truncation < 1) throw std::invalid_argument("extremal_l1_mass: truncation must be >= 1");

    ExtremalMass out;
    out.truncation = truncation;

    // partial sum of 1/k^2, small terms first
    double h = 0.0;
    for (std::size_t k = truncation; k >= 1; --k)
        h += 1.0 / (static_cast<double>(k) * static_cast<double>(k));

    out.rule_scale = 1.0 / std::sqrt(2.0 * kPi * h);
    // mass of the rule a_k = b_k = t / k^2, summed explicitly (tail first)
    double mass = 0.0;
    for (std::size_t k = truncation; k >= 1; --k)
        mass += 2.0 * out.rule_scale / (static_cast<double>(k) * static_cast<double>(k));
    out.mass = mass;

    out.rule_seminorm = sobolev_seminorm(out.rule_function(truncation), 1);

    // independent oracle over all 2M coefficients, d_i = pi k^2
    std::vector<double> d(2 * truncation);
    for (std::size_t k = 1; k <= truncation; ++k) {
        const double dk = kPi * static_cast<double>(k) * static_cast<double>(k);
        d[2 * (k - 1)] = dk;
        d[2 * (k - 1) + 1] = dk;
    }
    out.oracle_mass = ellipsoid_linear_max_pga(d, 5000, 1e-14);

    out.limit_mass = std::sqrt(kPi / 3.0);
    out.quoted_mass_pi_over_sqrt3 = kPi / std::sqrt(3.0);
    out.discrepancy_vs_quoted = std::abs(out.mass - out.quoted_mass_pi_over_sqrt3);
    return out;
}

double adequate_lambda(const SobolevBallSpec& spec) {
    // coefficient mass of any optimal projection: |a0| <= C/(2 pi) plus the
    // extremal series mass, which is largest at r = 1
    return spec.C / (2.0 * kPi) + std::sqrt(kPi / 3.0);
}

namespace {

FourierFunction random_ball_member(const SobolevBallSpec& spec, Rng& rng, std::size_t terms) {
    FourierFunction f;
    f.cos_coeffs.resize(terms);
    f.sin_coeffs.resize(terms);
    for (std::size_t k = 1; k <= terms; ++k) {
        const double decay = std::pow(static_cast<double>(k), -(spec.r + 1.0));
        f.cos_coeffs[k - 1] = rng.normal() * decay;
        f.sin_coeffs[k - 1] = rng.normal() * decay;
    }
    const double s = sobolev_seminorm(f, spec.r);
    const double target = rng.uniform(0.3, 1.0);
    if (s > 0.0) {
        const double factor = target / s;
        for (double& c : f.cos_coeffs) c *= factor;
        for (double& c : f.sin_coeffs) c *= factor;
    }
    f.a0 = rng.uniform(-1.0, 1.0) * spec.C / (2.0 * kPi);
    return f;
}

/// Maximal-coefficient-mass ball member: the r-specific stationarity rule
/// a_k = b_k = t / k^(2r) scaled to seminorm 1, with the mean at its bound.
FourierFunction extremal_member(const SobolevBallSpec& spec, std::size_t terms) {
    FourierFunction f;
    f.cos_coeffs.resize(terms);
    f.sin_coeffs.resize(terms);
    for (std::size_t k = 1; k <= terms; ++k) {
        const double c = std::pow(static_cast<double>(k), -2.0 * spec.r);
        f.cos_coeffs[k - 1] = c;
        f.sin_coeffs[k - 1] = c;
    }
    const double s = sobolev_seminorm(f, spec.r);
    for (double& c : f.cos_coeffs) c /= s;
    for (double& c : f.sin_coeffs) c /= s;
    f.a0 = spec.C / (2.0 * kPi);
    return f;
}

}  // namespace

WidthComparison width_comparison(const SobolevBallSpec& spec, std::size_t n_atoms, double lambda,
                                 const DomainPtr& torus, std::uint64_t seed,
                                 std::size_t n_samples, const SolverOptions& options) {
    if (!(lambda > 0.0)) throw std::invalid_argument("width_comparison: lambda must be positive");
    if (n_atoms < 1) throw std::invalid_argument("width_comparison: need at least one atom");
    if (!torus || torus->dim() != 1)
        throw std::invalid_argument("width_comparison: need a 1-d torus domain");

    const NormSpec spec2(2.0, torus);
    const std::vector<FunctionVector> atoms = trig_atoms(torus, n_atoms);
    const std::vector<FunctionVector> scaled_atoms = trig_atoms(torus, n_atoms, lambda);

    constexpr std::size_t kTerms = 64;
    // lowest frequency outside the span; the witness picks the branch
    // (sin/cos) that the span is missing at that frequency
    const std::size_t q = (n_atoms + 1) / 2;
    FourierFunction witness;
    witness.cos_coeffs.assign(q, 0.0);
    witness.sin_coeffs.assign(q, 0.0);
    const double amp = 1.0 / (std::sqrt(kPi) * std::pow(static_cast<double>(q),
                                                        static_cast<double>(spec.r)));
    if (n_atoms % 2 == 1) witness.sin_coeffs[q - 1] = amp;
    else witness.cos_coeffs[q - 1] = amp;

    std::vector<std::pair<std::string, FourierFunction>> targets;
    targets.emplace_back("witness", witness);
    targets.emplace_back("extremal_mass", extremal_member(spec, kTerms));
    for (std::size_t s = 0; s < n_samples; ++s) {
        Rng rng(derive_seed(seed, s));
        targets.emplace_back("sample_" + std::to_string(s), random_ball_member(spec, rng, kTerms));
    }

    WidthComparison out;
    for (const auto& [label, ff] : targets) {
        const FunctionVector target = ff.evaluate(torus);
        const double lin = linear_fit(target, atoms, spec2).error;
        const double cvx = convex_fit(target, scaled_atoms, n_atoms, spec2, options).error;
        out.rows.push_back({label, lin, cvx});
        out.linear_error = std::max(out.linear_error, lin);
        out.convex_error = std::max(out.convex_error, cvx);
        out.max_difference = std::max(out.max_difference, cvx - lin);
    }
    return out;
}

}  // namespace widthlab
