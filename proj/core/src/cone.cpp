// Copyright (C) 2026 creascore authors
// SPDX-License-Identifier: Apache-2.0

#include "creascore/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

#include "creascore/errors.hpp"

namespace creascore {

namespace {

constexpr double kSingularCutoff = 1e-12;

Eigen::MatrixXd to_matrix(const PremiseMatrix& premises) {
    const auto d = static_cast<Eigen::Index>(premises.dim());
    const auto k = static_cast<Eigen::Index>(premises.k());
    Eigen::MatrixXd A(d, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& col = premises.columns[static_cast<std::size_t>(j)].values;
        for (Eigen::Index i = 0; i < d; ++i) A(i, j) = col[static_cast<std::size_t>(i)];
    }
    return A;
}

// Content order: columns compared lexicographically by components, original
// index as the final tiebreak. Reductions over support columns run in this
// order so that permuting the premise columns permutes the result
// bit-exactly.
std::vector<int> content_ranks(const Eigen::MatrixXd& A) {
    const int k = static_cast<int>(A.cols());
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (A(i, a) != A(i, b)) return A(i, a) < A(i, b);
        }
        return a < b;
    });
    std::vector<int> rank(static_cast<std::size_t>(k));
    for (int pos = 0; pos < k; ++pos) rank[static_cast<std::size_t>(order[pos])] = pos;
    return rank;
}

// Min-norm least squares on the given columns, singular values below the
// cutoff dropped.
Eigen::VectorXd solve_support(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<int>& support) {
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
        As.col(static_cast<Eigen::Index>(j)) = A.col(support[j]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSingularCutoff);
    return svd.solve(b);
}

Eigen::VectorXd accumulate_projection(const Eigen::MatrixXd& A, const Eigen::VectorXd& c,
                                      const std::vector<int>& sorted_support) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(A.rows());
    for (int j : sorted_support) s += c(j) * A.col(j);
    return s;
}

void validate_pair(const EmbeddingVector& r, const PremiseMatrix& premises) {
    if (premises.k() < 2) {
        throw InvalidInputError("cone: need at least 2 premise columns, got " +
                                std::to_string(premises.k()));
    }
    if (r.dim() != premises.dim()) {
        throw InvalidInputError("cone: response dim " + std::to_string(r.dim()) +
                                " does not match premise dim " + std::to_string(premises.dim()));
    }
}

}  // namespace

PremiseMatrix PremiseMatrix::build(std::vector<EmbeddingVector> columns,
                                   std::vector<std::size_t> group_of, std::size_t premise_count) {
    if (columns.size() < 2) {
        throw InvalidInputError("premise matrix: need at least 2 columns, got " +
                                std::to_string(columns.size()));
    }
    if (group_of.size() != columns.size()) {
        throw InvalidInputError("premise matrix: group_of size does not match column count");
    }
    if (premise_count == 0) throw InvalidInputError("premise matrix: premise_count is zero");

    const std::size_t d = columns.front().dim();
    if (d < 2) throw InvalidInputError("premise matrix: columns must have dim >= 2");
    std::vector<bool> seen(premise_count, false);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].dim() != d) {
            throw InvalidInputError("premise matrix: column " + std::to_string(j) +
                                    " has mismatched dim");
        }
        double sumsq = 0.0;
        for (double v : columns[j].values) sumsq += v * v;
        if (std::abs(std::sqrt(sumsq) - 1.0) > 1e-6) {
            throw InvalidInputError("premise matrix: column " + std::to_string(j) +
                                    " is not unit norm");
        }
        if (group_of[j] >= premise_count) {
            throw InvalidInputError("premise matrix: column " + std::to_string(j) +
                                    " maps to premise " + std::to_string(group_of[j]) +
                                    " out of range");
        }
        seen[group_of[j]] = true;
    }
    for (std::size_t g = 0; g < premise_count; ++g) {
        if (!seen[g]) {
            throw InvalidInputError("premise matrix: premise " + std::to_string(g) +
                                    " owns no column");
        }
    }
    return PremiseMatrix{std::move(columns), std::move(group_of), premise_count};
}

PremiseMatrix PremiseMatrix::ungrouped(std::vector<EmbeddingVector> columns) {
    std::vector<std::size_t> identity(columns.size());
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const std::size_t k = columns.size();
    return build(std::move(columns), std::move(identity), k);
}

ConeProjection project_onto_cone(const EmbeddingVector& r, const PremiseMatrix& premises,
                                 double tol) {
    validate_pair(r, premises);
    if (!(tol > 0.0)) throw InvalidInputError("cone: tol must be positive");

    const Eigen::MatrixXd A = to_matrix(premises);
    const Eigen::VectorXd b =
        Eigen::Map<const Eigen::VectorXd>(r.values.data(), static_cast<Eigen::Index>(r.dim()));
    const int k = static_cast<int>(premises.k());
    const std::vector<int> rank = content_ranks(A);
    const int cap = 50 * k;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
    std::vector<int> support;
    std::vector<bool> in_support(static_cast<std::size_t>(k), false);
    int iterations = 0;
    bool converged = false;

    auto content_sorted = [&](std::vector<int> cols) {
        std::sort(cols.begin(), cols.end(), [&](int a, int b) { return rank[a] < rank[b]; });
        return cols;
    };

    for (;;) {
        const std::vector<int> sorted_support = content_sorted(support);
        const Eigen::VectorXd resid = b - accumulate_projection(A, c, sorted_support);

        // Negative gradient per column; each entry depends only on that
        // column and the residual, never on column order.
        Eigen::VectorXd w(k);
        for (int j = 0; j < k; ++j) w(j) = A.col(j).dot(resid);

        std::vector<bool> banned(static_cast<std::size_t>(k), false);
        int chosen = -1;
        bool cap_exceeded = false;
        Eigen::VectorXd z;
        std::vector<int> trial_sorted;
        for (;;) {
            chosen = -1;
            double best = tol;
            for (int j = 0; j < k; ++j) {
                if (in_support[static_cast<std::size_t>(j)] || banned[static_cast<std::size_t>(j)])
                    continue;
                if (w(j) > best) {
                    best = w(j);
                    chosen = j;
                }
            }
            if (chosen < 0) break;  // no violating column left

            trial_sorted = content_sorted([&] {
                auto cols = support;
                cols.push_back(chosen);
                return cols;
            }());
            z = solve_support(A, b, trial_sorted);
            ++iterations;

            const auto pos = static_cast<std::size_t>(
                std::find(trial_sorted.begin(), trial_sorted.end(), chosen) -
                trial_sorted.begin());
            if (z(static_cast<Eigen::Index>(pos)) <= 0.0) {
                // Numerically unable to improve along this column; skip it
                // for this pass.
                banned[static_cast<std::size_t>(chosen)] = true;
                chosen = -1;
                if (iterations >= cap) {
                    cap_exceeded = true;
                    break;
                }
                continue;
            }
            break;
        }
        if (chosen < 0) {
            converged = !cap_exceeded;
            break;
        }

        support.push_back(chosen);
        in_support[static_cast<std::size_t>(chosen)] = true;
        std::vector<int> current_sorted = trial_sorted;

        // Feasibility loop: step towards z, dropping coefficients that hit
        // zero, until the subproblem solution is entirely positive.
        for (;;) {
            bool all_positive = true;
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                if (z(i) <= 0.0) {
                    all_positive = false;
                    break;
                }
            }
            if (all_positive) {
                Eigen::VectorXd next = Eigen::VectorXd::Zero(k);
                for (std::size_t i = 0; i < current_sorted.size(); ++i) {
                    next(current_sorted[i]) = z(static_cast<Eigen::Index>(i));
                }
                c = next;
                break;
            }

            double alpha = std::numeric_limits<double>::infinity();
            double cmax = 0.0;
            for (std::size_t i = 0; i < current_sorted.size(); ++i) {
                const int col = current_sorted[i];
                cmax = std::max(cmax, c(col));
                const double zi = z(static_cast<Eigen::Index>(i));
                if (zi <= 0.0) {
                    const double denom = c(col) - zi;
                    const double ratio = denom > 0.0 ? c(col) / denom : 0.0;
                    alpha = std::min(alpha, ratio);
                }
            }
            if (!std::isfinite(alpha)) alpha = 0.0;

            for (std::size_t i = 0; i < current_sorted.size(); ++i) {
                const int col = current_sorted[i];
                c(col) += alpha * (z(static_cast<Eigen::Index>(i)) - c(col));
            }

            const double removal_eps = 1e-12 * (1.0 + cmax);
            std::vector<int> kept;
            kept.reserve(current_sorted.size());
            for (std::size_t i = 0; i < current_sorted.size(); ++i) {
                const int col = current_sorted[i];
                if (z(static_cast<Eigen::Index>(i)) <= 0.0 && c(col) <= removal_eps) {
                    c(col) = 0.0;
                    in_support[static_cast<std::size_t>(col)] = false;
                } else {
                    kept.push_back(col);
                }
            }
            current_sorted = kept;  // already in content order
            support.clear();
            for (int col = 0; col < k; ++col) {
                if (in_support[static_cast<std::size_t>(col)]) support.push_back(col);
            }

            if (current_sorted.empty()) {
                c.setZero();
                break;
            }
            if (iterations >= cap) break;
            z = solve_support(A, b, current_sorted);
            ++iterations;
        }

        if (iterations >= cap) {
            converged = false;
            break;
        }
    }

    ConeProjection result;
    result.iterations = iterations;
    result.converged = converged;
    result.coefficients.assign(c.data(), c.data() + k);

    const Eigen::VectorXd s = accumulate_projection(A, c, content_sorted(support));
    const double resid_norm = (b - s).norm();
    const double b_norm = b.norm();
    if (resid_norm > b_norm + 1e-12) {
        // The zero solution is always admissible; fall back to it rather
        // than report a projection that is worse.
        result.coefficients.assign(static_cast<std::size_t>(k), 0.0);
        result.projection.assign(static_cast<std::size_t>(A.rows()), 0.0);
        result.residual_norm = b_norm;
        result.converged = false;
        return result;
    }
    result.projection.assign(s.data(), s.data() + s.size());
    result.residual_norm = resid_norm;
    return result;
}

NoveltyScore novelty(const ConeProjection& projection, const EmbeddingVector& r) {
    double sumsq = 0.0;
    for (double v : r.values) sumsq += v * v;
    if (std::abs(std::sqrt(sumsq) - 1.0) > 1e-6) {
        throw InvalidInputError("novelty: response vector must be unit norm");
    }
    double n = projection.residual_norm;
    if (n > 1.0) {
        if (n > 1.0 + 1e-9) {
            throw InvalidInputError("novelty: residual norm " + std::to_string(n) +
                                    " exceeds the unit bound");
        }
        n = 1.0;
    }
    if (n < 0.0) n = 0.0;
    return NoveltyScore{n};
}

ConeProjection oracle_project(const EmbeddingVector& r, const PremiseMatrix& premises) {
    validate_pair(r, premises);
    const std::size_t k = premises.k();
    if (k > 12) {
        throw OracleScopeError("oracle_project: k = " + std::to_string(k) +
                               " exceeds the enumerable limit of 12");
    }

    const Eigen::MatrixXd A = to_matrix(premises);
    const Eigen::VectorXd b =
        Eigen::Map<const Eigen::VectorXd>(r.values.data(), static_cast<Eigen::Index>(r.dim()));

    Eigen::VectorXd best_c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    double best_resid = b.norm();  // empty support
    int evaluated = 1;

    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<int> support;
        for (std::size_t j = 0; j < k; ++j) {
            if (mask & (1u << j)) support.push_back(static_cast<int>(j));
        }
        Eigen::VectorXd z = solve_support(A, b, support);
        ++evaluated;

        bool feasible = true;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            if (z(i) < -1e-12) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;

        Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < support.size(); ++i) {
            c(support[i]) = std::max(0.0, z(static_cast<Eigen::Index>(i)));
        }
        const double resid = (b - A * c).norm();
        if (resid < best_resid) {
            best_resid = resid;
            best_c = c;
        }
    }

    ConeProjection result;
    result.coefficients.assign(best_c.data(), best_c.data() + best_c.size());
    const Eigen::VectorXd s = A * best_c;
    result.projection.assign(s.data(), s.data() + s.size());
    result.residual_norm = best_resid;
    result.converged = true;
    result.iterations = evaluated;
    return result;
}

}  // namespace creascore
