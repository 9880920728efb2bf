#include "widthlab/convex_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace widthlab {

namespace {

constexpr double kMassSlack = 1e-12;

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

/// Euclidean projection onto the l1 ball of the given radius (sort-based).
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
    const double mass = v.cwiseAbs().sum();
    if (mass <= radius) return v;
    std::vector<double> mags(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
        cumulative += mags[k];
        const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
        if (k + 1 == mags.size() || mags[k + 1] <= candidate) {
            theta = candidate;
            break;
        }
    }
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - theta;
        out[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
    }
    return out;
}

/// minimize 0.5 c'Gc - b'c subject to ||c||_1 <= radius.
/// FISTA with restarts; returns the best iterate seen, so the result never
/// scores worse than c0.
Eigen::VectorXd l1_constrained_quadratic(const Eigen::MatrixXd& gram, const Eigen::VectorXd& lin,
                                         Eigen::VectorXd c0, double radius, int max_iter = 500,
                                         double step_tol = 1e-15) {
    const auto objective = [&](const Eigen::VectorXd& c) {
        return 0.5 * c.dot(gram * c) - lin.dot(c);
    };
    double lip = gram.cwiseAbs().rowwise().sum().maxCoeff();  // Gershgorin bound on ||G||_2
    if (!(lip > 0.0)) lip = 1.0;
    const double step = 1.0 / lip;

    Eigen::VectorXd best = project_l1_ball(c0, radius);
    double best_obj = objective(best);
    Eigen::VectorXd x = best;
    Eigen::VectorXd y = x;
    double momentum = 1.0;

    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd grad = gram * y - lin;
        Eigen::VectorXd x_next = project_l1_ball(y - step * grad, radius);
        const double obj = objective(x_next);
        if (obj < best_obj) {
            best_obj = obj;
            best = x_next;
        } else if (obj > best_obj) {
            // restart momentum when the accelerated sequence overshoots
            momentum = 1.0;
            y = best;
            x = best;
            continue;
        }
        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = x_next + ((momentum - 1.0) / momentum_next) * (x_next - x);
        const double shift = (x_next - x).lpNorm<Eigen::Infinity>();
        x = std::move(x_next);
        momentum = momentum_next;
        if (shift <= step_tol) break;
    }
    return best;
}

struct ActiveSet {
    std::vector<std::size_t> atoms;   // basis indices, insertion order
    Eigen::MatrixXd gram;             // weighted Gram of active atoms
    Eigen::VectorXd lin;              // weighted <f, phi_a>
    Eigen::VectorXd coef;

    std::size_t size() const { return atoms.size(); }

    int find(std::size_t idx) const {
        for (std::size_t a = 0; a < atoms.size(); ++a)
            if (atoms[a] == idx) return static_cast<int>(a);
        return -1;
    }

    void insert(std::size_t idx, std::span<const FunctionVector> basis,
                const std::vector<double>& f, const std::vector<double>& w) {
        const std::size_t a = atoms.size();
        atoms.push_back(idx);
        gram.conservativeResize(a + 1, a + 1);
        lin.conservativeResize(a + 1);
        coef.conservativeResize(a + 1);
        coef[a] = 0.0;
        const auto& phi = basis[idx].values();
        for (std::size_t q = 0; q < atoms.size(); ++q) {
            const double g = weighted_dot(phi, basis[atoms[q]].values(), w);
            gram(a, q) = g;
            gram(q, a) = g;
        }
        lin[a] = weighted_dot(phi, f, w);
    }

    void drop_zeros() {
        std::vector<std::size_t> keep;
        for (std::size_t a = 0; a < atoms.size(); ++a)
            if (coef[a] != 0.0) keep.push_back(a);
        if (keep.size() == atoms.size()) return;
        ActiveSet next;
        next.atoms.reserve(keep.size());
        next.gram.resize(keep.size(), keep.size());
        next.lin.resize(keep.size());
        next.coef.resize(keep.size());
        for (std::size_t a = 0; a < keep.size(); ++a) {
            next.atoms.push_back(atoms[keep[a]]);
            next.lin[a] = lin[keep[a]];
            next.coef[a] = coef[keep[a]];
            for (std::size_t q = 0; q < keep.size(); ++q)
                next.gram(a, q) = gram(keep[a], keep[q]);
        }
        *this = std::move(next);
    }
};

ConvexCombination finalize_combination(const ActiveSet& active) {
    std::vector<std::size_t> perm(active.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return active.atoms[a] < active.atoms[b]; });
    ConvexCombination combo;
    for (std::size_t a : perm) {
        if (active.coef[a] == 0.0) continue;
        combo.indices.push_back(active.atoms[a]);
        combo.coefficients.push_back(active.coef[a]);
    }
    combo.l1_mass = l1_mass(combo.coefficients);
    return combo;
}

std::vector<double> evaluate_combination(const ActiveSet& active,
                                         std::span<const FunctionVector> basis, std::size_t m) {
    std::vector<double> g(m, 0.0);
    for (std::size_t a = 0; a < active.size(); ++a) {
        const double c = active.coef[a];
        if (c == 0.0) continue;
        const auto& v = basis[active.atoms[a]].values();
        for (std::size_t j = 0; j < m; ++j) g[j] += c * v[j];
    }
    return g;
}

void check_basis(const FunctionVector& f, std::span<const FunctionVector> basis,
                 const NormSpec& spec) {
    if (basis.empty()) throw std::invalid_argument("approximation: empty basis");
    if (!compatible_domains(f.domain(), spec.domain()))
        throw std::invalid_argument("approximation: target/norm domain mismatch");
    for (const auto& phi : basis)
        if (!compatible_domains(phi.domain(), f.domain()))
            throw std::invalid_argument("approximation: basis/target domain mismatch");
}

}  // namespace

double l1_mass(std::span<const double> coefficients) {
    double mass = 0.0;
    for (double c : coefficients) mass += std::abs(c);
    return mass;
}

ApproxResult convex_fit(const FunctionVector& f, std::span<const FunctionVector> basis,
                        std::size_t n_budget, const NormSpec& spec, const SolverOptions& options,
                        const ConvexCombination* warm_start) {
    check_basis(f, basis, spec);
    if (!(options.tol > 0.0)) throw std::invalid_argument("convex_fit: tol must be positive");
    if (n_budget == 0) throw std::invalid_argument("convex_fit: atom budget must be >= 1");
    const std::size_t m = f.size();
    const auto& w = spec.domain()->weights();
    const bool l2 = spec.p() == 2.0;

    ActiveSet active;
    active.gram.resize(0, 0);
    active.lin.resize(0);
    active.coef.resize(0);
    if (warm_start != nullptr) {
        if (warm_start->indices.size() != warm_start->coefficients.size())
            throw std::invalid_argument("convex_fit: malformed warm start");
        if (l1_mass(warm_start->coefficients) > 1.0 + kMassSlack)
            throw std::invalid_argument("convex_fit: warm start mass exceeds 1");
        for (std::size_t i = 0; i < warm_start->indices.size(); ++i) {
            const std::size_t idx = warm_start->indices[i];
            if (idx >= basis.size())
                throw std::invalid_argument("convex_fit: warm start index out of range");
            if (active.find(idx) >= 0)
                throw std::invalid_argument("convex_fit: duplicate warm start index");
            active.insert(idx, basis, f.values(), w);
            active.coef[active.size() - 1] = warm_start->coefficients[i];
        }
        active.drop_zeros();
        if (active.size() > n_budget)
            throw std::invalid_argument("convex_fit: warm start exceeds atom budget");
    }

    std::vector<double> g = evaluate_combination(active, basis, m);
    std::vector<double> residual(m);
    auto refresh_residual = [&]() {
        for (std::size_t j = 0; j < m; ++j) residual[j] = f[j] - g[j];
    };
    refresh_residual();

    NormSpec residual_spec = spec;
    auto residual_norm = [&]() {
        return norm(FunctionVector(f.domain(), residual), residual_spec);
    };

    double err = residual_norm();
    ApproxResult out;
    if (options.record_trace) out.error_trace.push_back(err);
    int iterations = 0;
    bool converged = false;

    for (int t = 0; t < options.max_iter; ++t) {
        if (err == 0.0) {
            converged = true;
            break;
        }

        // alignment scores: weighted inner products for p=2, subgradient otherwise
        std::vector<double> score_vec(m);
        if (l2) {
            for (std::size_t j = 0; j < m; ++j) score_vec[j] = w[j] * residual[j];
        } else {
            const double p = spec.p();
            for (std::size_t j = 0; j < m; ++j) {
                const double r = residual[j];
                const double mag = std::abs(r);
                score_vec[j] = w[j] * (r >= 0.0 ? 1.0 : -1.0) *
                               (p == 1.0 ? 1.0 : std::pow(mag, p - 1.0));
            }
        }

        const bool restrict_to_active = active.size() >= n_budget;
        std::vector<std::size_t> restricted;
        if (restrict_to_active) {
            restricted = active.atoms;
            std::sort(restricted.begin(), restricted.end());  // ties go to the lowest index
        }
        double best_score = -1.0;
        std::size_t best_idx = 0;
        const std::size_t candidates = restrict_to_active ? restricted.size() : basis.size();
        for (std::size_t c = 0; c < candidates; ++c) {
            const std::size_t idx = restrict_to_active ? restricted[c] : c;
            const auto& phi = basis[idx].values();
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) dot += score_vec[j] * phi[j];
            const double s = std::abs(dot);
            if (s > best_score) {
                best_score = s;
                best_idx = idx;
            }
        }
        // direction sign chosen so the signed atom points along the residual
        const auto& phi_best = basis[best_idx].values();
        double align = 0.0;
        for (std::size_t j = 0; j < m; ++j) align += score_vec[j] * phi_best[j];
        const double atom_sign = align >= 0.0 ? 1.0 : -1.0;

        double new_err = err;
        if (l2) {
            // exact line search toward the vertex v = sign * phi
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double dj = atom_sign * phi_best[j] - g[j];
                num += w[j] * residual[j] * dj;
                den += w[j] * dj * dj;
            }
            double gamma = den > 0.0 ? num / den : 0.0;
            gamma = std::clamp(gamma, 0.0, 1.0);

            int pos = active.find(best_idx);
            if (pos < 0) {
                active.insert(best_idx, basis, f.values(), w);
                pos = static_cast<int>(active.size()) - 1;
            }
            active.coef *= (1.0 - gamma);
            active.coef[pos] += gamma * atom_sign;

            // fully-corrective re-fit over the active atoms
            active.coef = l1_constrained_quadratic(active.gram, active.lin, active.coef, 1.0);
            active.drop_zeros();
            g = evaluate_combination(active, basis, m);
            refresh_residual();
            new_err = residual_norm();
        } else {
            int pos = active.find(best_idx);
            if (pos < 0) {
                active.insert(best_idx, basis, f.values(), w);
                pos = static_cast<int>(active.size()) - 1;
            }
            double gamma = 2.0 / (static_cast<double>(t) + 2.0);
            const Eigen::VectorXd saved = active.coef;
            bool improved = false;
            while (gamma > 1e-16) {
                active.coef = saved * (1.0 - gamma);
                active.coef[pos] += gamma * atom_sign;
                g = evaluate_combination(active, basis, m);
                refresh_residual();
                new_err = residual_norm();
                if (new_err <= err) {
                    improved = true;
                    break;
                }
                gamma *= 0.5;
            }
            if (!improved) {
                active.coef = saved;
                g = evaluate_combination(active, basis, m);
                refresh_residual();
                new_err = err;
            }
            active.drop_zeros();
        }

        iterations = t + 1;
        if (options.record_trace) out.error_trace.push_back(new_err);
        const double improvement = err - new_err;
        err = new_err;
        if (improvement < options.tol) {
            converged = true;
            break;
        }
    }

    out.combination = finalize_combination(active);
    out.iterations = iterations;
    out.converged = converged;
    // recompute the error from scratch off the returned combination
    if (out.combination.indices.empty()) {
        out.error = norm(f, spec);
    } else {
        std::vector<FunctionVector> used;
        used.reserve(out.combination.indices.size());
        for (std::size_t idx : out.combination.indices) used.push_back(basis[idx]);
        const FunctionVector approx = combine(used, out.combination.coefficients);
        std::vector<double> res(m);
        for (std::size_t j = 0; j < m; ++j) res[j] = f[j] - approx[j];
        out.error = norm(FunctionVector(f.domain(), std::move(res)), spec);
    }
    return out;
}

ApproxResult linear_fit(const FunctionVector& f, std::span<const FunctionVector> basis,
                        const NormSpec& spec) {
    check_basis(f, basis, spec);
    if (spec.p() != 2.0)
        throw std::invalid_argument("linear_fit: only the weighted L2 norm is supported");
    const std::size_t m = f.size();
    const std::size_t nb = basis.size();
    const auto& w = spec.domain()->weights();

    Eigen::MatrixXd a(m, nb);
    Eigen::VectorXd y(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double sw = std::sqrt(w[j]);
        y[j] = sw * f[j];
        for (std::size_t c = 0; c < nb; ++c) a(j, c) = sw * basis[c][j];
    }
    const Eigen::VectorXd coef = a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);

    ApproxResult out;
    out.combination.indices.resize(nb);
    std::iota(out.combination.indices.begin(), out.combination.indices.end(), 0);
    out.combination.coefficients.assign(coef.data(), coef.data() + nb);
    out.combination.l1_mass = l1_mass(out.combination.coefficients);
    out.iterations = 0;
    out.converged = true;

    const FunctionVector approx = combine(basis, out.combination.coefficients);
    std::vector<double> res(m);
    for (std::size_t j = 0; j < m; ++j) res[j] = f[j] - approx[j];
    out.error = norm(FunctionVector(f.domain(), std::move(res)), spec);
    return out;
}

ShiftedCoreResult shifted_core(const FunctionVector& f, std::span<const FunctionVector> basis,
                               std::span<const double> coeffs, const NormSpec& spec) {
    if (basis.size() != coeffs.size())
        throw std::invalid_argument("shifted_core: basis/coefficients length mismatch");
    check_basis(f, basis, spec);
    const double mass = l1_mass(coeffs);
    if (mass > 1.0 + kMassSlack)
        throw std::invalid_argument("shifted_core: coefficient mass exceeds 1");

    const std::size_t m = f.size();
    std::vector<double> residual(f.values());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double c = coeffs[i];
        if (c == 0.0) continue;
        const auto& v = basis[i].values();
        for (std::size_t j = 0; j < m; ++j) residual[j] -= c * v[j];
    }
    const FunctionVector r(f.domain(), residual);
    const double alpha = norm(r, spec);
    const double lambda0 = std::max(0.0, 1.0 - mass);

    ShiftedCoreResult out;
    out.alpha = alpha;
    out.coefficients.reserve(basis.size() + 1);
    out.coefficients.push_back(lambda0);
    out.core.reserve(basis.size() + 1);
    // entry 0: the zero element shifted by sign(lambda_0) * r
    if (lambda0 > 0.0) {
        out.core.push_back(r);
    } else {
        out.core.push_back(FunctionVector::zero(f.domain()));
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double c = coeffs[i];
        out.coefficients.push_back(c);
        if (c == 0.0) {
            out.core.push_back(basis[i]);
        } else {
            const double s = c > 0.0 ? 1.0 : -1.0;
            std::vector<double> shifted(m);
            const auto& v = basis[i].values();
            for (std::size_t j = 0; j < m; ++j) shifted[j] = v[j] + s * residual[j];
            out.core.emplace_back(f.domain(), std::move(shifted));
        }
    }
    return out;
}

ApproxResult collapse_to_cover(std::span<const FunctionVector> members,
                               std::span<const std::size_t> member_indices,
                               std::span<const double> coeffs, const EpsCover& cover,
                               const NormSpec& spec, const FunctionVector* target) {
    if (member_indices.size() != coeffs.size())
        throw std::invalid_argument("collapse_to_cover: indices/coefficients length mismatch");
    if (member_indices.empty())
        throw std::invalid_argument("collapse_to_cover: empty combination");
    if (!cover.certified)
        throw std::invalid_argument("collapse_to_cover: cover is not certified");
    const double mass = l1_mass(coeffs);
    if (mass > 1.0 + kMassSlack)
        throw std::invalid_argument("collapse_to_cover: coefficient mass exceeds 1");

    for (std::size_t idx : member_indices)
        if (idx >= members.size())
            throw std::invalid_argument("collapse_to_cover: member index out of range");

    // the combination itself
    std::vector<FunctionVector> used;
    used.reserve(member_indices.size());
    for (std::size_t idx : member_indices) used.push_back(members[idx]);
    const FunctionVector combo = combine(used, coeffs);

    const FunctionVector& f = target != nullptr ? *target : combo;
    const double delta = target != nullptr ? lp_distance(f, combo, spec) : 0.0;

    // nearest certified center per participating member; ties to the earliest
    // center in cover order
    std::vector<double> collapsed(cover.center_indices.size(), 0.0);
    for (std::size_t q = 0; q < member_indices.size(); ++q) {
        const auto& member = members[member_indices[q]];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < cover.center_indices.size(); ++c) {
            const double d = lp_distance(member, members[cover.center_indices[c]], spec);
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        collapsed[best_c] += coeffs[q];
    }

    ApproxResult out;
    std::vector<FunctionVector> center_members;
    for (std::size_t c = 0; c < cover.center_indices.size(); ++c) {
        if (collapsed[c] == 0.0) continue;
        out.combination.indices.push_back(cover.center_indices[c]);
        out.combination.coefficients.push_back(collapsed[c]);
        center_members.push_back(members[cover.center_indices[c]]);
    }
    out.combination.l1_mass = l1_mass(out.combination.coefficients);
    out.iterations = 0;
    out.converged = true;

    if (center_members.empty()) {
        out.error = norm(f, spec);
    } else {
        const FunctionVector approx = combine(center_members, out.combination.coefficients);
        out.error = lp_distance(f, approx, spec);
    }

    if (out.combination.l1_mass > mass + kMassSlack)
        throw InvariantError("collapse_to_cover: coefficient mass increased");
    if (out.error > delta + cover.epsilon + 1e-10)
        throw InvariantError("collapse_to_cover: error exceeds delta + epsilon");
    return out;
}

ApproxResult collapse_to_cover(const Dictionary& dict,
                               std::span<const std::size_t> member_indices,
                               std::span<const double> coeffs, const EpsCover& cover,
                               const NormSpec& spec, const FunctionVector* target) {
    return collapse_to_cover(std::span<const FunctionVector>(dict.members()), member_indices,
                             coeffs, cover, spec, target);
}

double width_upper_estimate(const std::function<FunctionVector(Rng&)>& class_sampler,
                            std::span<const FunctionVector> basis, std::size_t n,
                            const NormSpec& spec, std::size_t trials, std::uint64_t seed,
                            const SolverOptions& options) {
    if (trials == 0) throw std::invalid_argument("width_upper_estimate: trials must be >= 1");
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, t));
        const FunctionVector f = class_sampler(rng);
        const ApproxResult res = convex_fit(f, basis, n, spec, options);
        worst = std::max(worst, res.error);
    }
    return worst;
}

}  // namespace widthlab
