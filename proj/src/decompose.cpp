#include "btensor/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "btensor/error.hpp"

namespace btensor {

namespace {

constexpr double kShiftTolerance = 1e-12;

Verdict entry_predicate(const Tensor& t, DecomposeMode mode) {
    return mode == DecomposeMode::Quasi ? is_quasi_double_B_tensor(t) : is_double_B_tensor(t);
}

std::string_view entry_class_label(DecomposeMode mode) {
    return mode == DecomposeMode::Quasi ? "quasi-double B-tensor" : "double B-tensor";
}

// Every positive off-diagonal entry must have all of its indices inside
// `rows`; symmetry guarantees it, and the beta shift depends on it.
void check_containment(const Tensor& t, const std::vector<bool>& in_rows) {
    for (int i = 0; i < t.dim(); ++i) {
        const auto row = t.row(i);
        const std::size_t diag = t.diagonal_offset_in_row(i);
        for (std::size_t q = 0; q < row.size(); ++q) {
            if (q == diag || row[q] <= 0.0) continue;
            const MultiIndex idx = t.index_of(i * t.row_length() + q);
            for (int v : idx.indices()) {
                if (!in_rows[v - 1]) {
                    throw std::logic_error("positive entry at " + idx.to_string() +
                                           " reaches row " + std::to_string(v) +
                                           " outside the active set");
                }
            }
        }
    }
}

std::string verdict_reason(const Verdict& v) {
    if (v.witness) return v.witness->describe();
    if (!v.notes.empty()) return v.notes.front();
    return "class test failed";
}

}  // namespace

std::string_view mode_name(DecomposeMode mode) {
    return mode == DecomposeMode::Quasi ? "quasi" : "double";
}

std::optional<DecomposeMode> mode_from_name(std::string_view name) {
    if (name == "quasi") return DecomposeMode::Quasi;
    if (name == "double") return DecomposeMode::Double;
    return std::nullopt;
}

Decomposition decompose(const Tensor& t, const DecomposeOptions& options) {
    if (auto v = symmetry_violation(t)) {
        throw PreconditionError("input is not symmetric",
                                "entry " + v->first.to_string() + " differs from " +
                                    v->second.to_string());
    }
    if (t.dim() < 2) {
        throw PreconditionError("input is not a " + std::string(entry_class_label(options.mode)),
                                "dim 1 has no index pairs");
    }
    if (Verdict v = entry_predicate(t, options.mode); !v) {
        throw PreconditionError("input is not a " + std::string(entry_class_label(options.mode)),
                                verdict_reason(v));
    }

    Decomposition out;
    out.mode = options.mode;
    Tensor current = t;
    const int n = t.dim();
    for (;;) {
        const auto stats = all_row_stats(current);
        std::vector<int> active;
        std::vector<bool> in_active(n, false);
        for (const auto& s : stats) {
            if (s.max_offdiagonal > 0.0) {
                active.push_back(s.row);
                in_active[s.row - 1] = true;
            }
        }
        if (active.empty()) break;
        if (out.steps.size() == static_cast<std::size_t>(n)) {
            throw std::logic_error("decomposition did not terminate within dim steps");
        }
        check_containment(current, in_active);

        double h = std::numeric_limits<double>::infinity();
        for (int i : active) h = std::min(h, stats[i - 1].max_offdiagonal);
        std::vector<int> exhausted;
        for (int i : active) {
            if (stats[i - 1].max_offdiagonal == h) exhausted.push_back(i);
        }

        IndexSubset rows(active, n);
        Tensor next = linear_combine(current, partially_all_one(t.order(), n, rows), -h);

        const auto next_stats = all_row_stats(next);
        for (int i = 0; i < n; ++i) {
            const double before = stats[i].beta;
            const double expected = in_active[i] ? before - h : before;
            if (std::abs(next_stats[i].beta - expected) >
                kShiftTolerance * std::max(1.0, std::abs(before))) {
                throw std::logic_error("beta shift identity broken at row " +
                                       std::to_string(i + 1));
            }
        }
        if (options.verify_steps) {
            if (Verdict v = entry_predicate(next, options.mode); !v) {
                throw std::logic_error("intermediate tensor left the class after step " +
                                       std::to_string(out.steps.size() + 1) + ": " +
                                       verdict_reason(v));
            }
        }

        out.steps.push_back({h, std::move(rows), IndexSubset(exhausted, n)});
        current = std::move(next);
    }
    out.residual = std::move(current);

    if (!is_Z_tensor(out.residual)) throw std::logic_error("residual is not a Z-tensor");
    if (!is_symmetric(out.residual)) throw std::logic_error("residual is not symmetric");
    const Verdict residual_class = options.mode == DecomposeMode::Quasi
                                       ? is_QDSDD(out.residual)
                                       : is_DSDD(out.residual);
    if (!residual_class) {
        throw std::logic_error("residual fails its diagonal dominance class: " +
                               verdict_reason(residual_class));
    }
    const Tensor rebuilt = reconstruct(out);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::abs(rebuilt[k] - t[k]) > kShiftTolerance * std::max(1.0, std::abs(t[k]))) {
            throw std::logic_error("reconstruction mismatch at " + t.index_of(k).to_string());
        }
    }
    return out;
}

Tensor reconstruct(const Decomposition& d) {
    Tensor sum = d.residual;
    for (const auto& step : d.steps) {
        sum = linear_combine(sum, partially_all_one(sum.order(), sum.dim(), step.rows), step.h);
    }
    return sum;
}

std::string_view verdict_name(PdVerdict v) {
    switch (v) {
        case PdVerdict::PositiveDefinite: return "PositiveDefinite";
        case PdVerdict::NotPositiveDefinite: return "NotPositiveDefinite";
        case PdVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::optional<PdVerdict> verdict_from_name(std::string_view name) {
    for (PdVerdict v : {PdVerdict::PositiveDefinite, PdVerdict::NotPositiveDefinite,
                        PdVerdict::Inconclusive}) {
        if (verdict_name(v) == name) return v;
    }
    return std::nullopt;
}

std::optional<int> qdsdd_pivot(const Tensor& t, double margin) {
    if (t.dim() < 2) return std::nullopt;
    const auto rows = all_row_stats(t);
    for (int i = 1; i <= t.dim(); ++i) {
        const RowStats& si = rows[i - 1];
        if (std::abs(si.diagonal) - si.r < margin) continue;
        bool all_pairs = true;
        for (int j = 1; j <= t.dim() && all_pairs; ++j) {
            if (j == i) continue;
            const PairStats p = pair_stats(t, i, j);
            const double lhs = std::abs(si.diagonal) * (std::abs(rows[j - 1].diagonal) - p.r_j_i);
            const double rhs = si.r * std::abs(p.tail);
            all_pairs = lhs - rhs > margin;
        }
        if (all_pairs) return i;
    }
    return std::nullopt;
}

Certificate pd_certify(const Tensor& t, const CertifyOptions& options) {
    Certificate cert;
    const bool even = t.order() % 2 == 0;
    const bool symmetric = is_symmetric(t);
    if (!even) {
        cert.notes.push_back("odd order: the form changes sign under x -> -x, and the class "
                             "criteria only certify even orders");
    }
    if (!symmetric) {
        cert.notes.push_back("tensor is not symmetric: the class criteria only certify "
                             "symmetric tensors");
    }

    const ClassifyOptions classify{options.margin, false};
    auto settle = [&](std::string_view route, std::vector<std::string> chain) {
        if (options.verbose) cert.all_routes.emplace_back(route);
        if (cert.verdict == PdVerdict::PositiveDefinite) return;
        cert.verdict = PdVerdict::PositiveDefinite;
        cert.route = route;
        cert.justification = {"order " + std::to_string(t.order()) + " is even",
                              "tensor is symmetric"};
        cert.justification.insert(cert.justification.end(), chain.begin(), chain.end());
    };
    auto attach_decomposition = [&](DecomposeMode mode) {
        if (cert.decomposition) return;
        try {
            cert.decomposition = decompose(t, {mode, true});
        } catch (const std::logic_error& e) {
            cert.notes.push_back(std::string("decomposition skipped: ") + e.what());
        }
    };

    if (even && symmetric) {
        const bool pairs = t.dim() >= 2;
        if (is_B_tensor(t, classify)) {
            settle(kRouteB, {"B-tensor: b_i..i - beta_i > Delta_i on every row",
                             "even-order symmetric B-tensors are positive definite"});
        }
        if ((options.verbose || cert.verdict != PdVerdict::PositiveDefinite) && pairs &&
            is_double_B_tensor(t, classify)) {
            const bool first = cert.verdict != PdVerdict::PositiveDefinite;
            settle(kRouteDoubleB,
                   {"double B-tensor: weak row dominance and the pairwise product condition",
                    "decomposes as a DSDD symmetric Z-tensor plus nonnegative multiples of "
                    "partially all one tensors",
                    "DSDD symmetric Z-tensors with positive diagonal are positive definite and "
                    "each partially all one term adds (sum_{i in J} x_i)^m >= 0"});
            if (first) attach_decomposition(DecomposeMode::Double);
        }
        if ((options.verbose || cert.verdict != PdVerdict::PositiveDefinite) && pairs &&
            is_quasi_double_B_tensor(t, classify)) {
            const bool first = cert.verdict != PdVerdict::PositiveDefinite;
            settle(kRouteQuasiDoubleB,
                   {"quasi-double B-tensor: the ordered pairwise condition holds for every (i, j)",
                    "decomposes as a Q-DSDD symmetric Z-tensor plus nonnegative multiples of "
                    "partially all one tensors",
                    "Q-DSDD symmetric Z-tensors with positive diagonal are positive definite and "
                    "each partially all one term adds (sum_{i in J} x_i)^m >= 0"});
            if (first) attach_decomposition(DecomposeMode::Quasi);
        }
        bool positive_diagonal = true;
        for (int i = 0; i < t.dim(); ++i) positive_diagonal = positive_diagonal && t.diagonal(i) > 0.0;
        if (pairs && positive_diagonal && (options.verbose || cert.verdict != PdVerdict::PositiveDefinite)) {
            if (is_DSDD(t, classify)) {
                settle(kRouteDSDD, {"positive diagonal", "DSDD: doubly strict diagonal dominance",
                                    "even-order symmetric DSDD tensors with positive diagonal are "
                                    "positive definite"});
            }
            if (auto pivot = qdsdd_pivot(t, options.margin)) {
                settle(kRouteQDSDD,
                       {"positive diagonal",
                        "pivot row " + std::to_string(*pivot) +
                            ": |a_ii| >= r_i and the absolute pairwise condition against every "
                            "other row",
                        "even-order symmetric tensors meeting the pivot condition are positive "
                        "definite"});
            }
        }
    }

    if (options.use_oracle && even) {
        OracleResult found = sphere_minimize(t, options.oracle);
        if (cert.verdict == PdVerdict::Inconclusive) {
            const double direct = form_value(t, found.minimizer);
            if (found.min_value <= 0.0 && direct <= 0.0) {
                cert.verdict = PdVerdict::NotPositiveDefinite;
                cert.route = kRouteOracle;
                cert.witness = found.minimizer;
                cert.justification = {"sphere search found x with A x^m = " +
                                      std::to_string(direct) + " <= 0"};
            } else {
                cert.notes.push_back("sphere search found no violation (least value " +
                                     std::to_string(found.min_value) +
                                     "); this is evidence, not a proof");
            }
        }
        cert.oracle = std::move(found);
    }
    return cert;
}

HEigenReport h_eigen_positivity_check(const Tensor& t, const OracleOptions& options) {
    if (t.order() % 2 != 0) {
        throw PreconditionError("H-eigenvalue positivity check needs even order",
                                "order " + std::to_string(t.order()));
    }
    if (auto v = symmetry_violation(t)) {
        throw PreconditionError("H-eigenvalue positivity check needs a symmetric tensor",
                                "entry " + v->first.to_string() + " differs from " +
                                    v->second.to_string());
    }
    if (t.dim() < 2) {
        throw PreconditionError("H-eigenvalue positivity check needs dim >= 2", "dim 1");
    }
    HEigenReport report;
    if (is_double_B_tensor(t)) {
        report.certified_class = TensorClass::DoubleB;
    } else if (Verdict v = is_quasi_double_B_tensor(t); v) {
        report.certified_class = TensorClass::QuasiDoubleB;
    } else {
        throw PreconditionError("tensor is neither double B nor quasi-double B",
                                verdict_reason(v));
    }
    report.evidence = lambda_min_search(t, options);
    report.lambda_min_estimate = *report.evidence.lambda_min_estimate;
    report.positive = report.lambda_min_estimate > 0.0;
    return report;
}

}  // namespace btensor
