#include "btensor/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "btensor/error.hpp"

namespace btensor {

namespace {

void check_row(const Tensor& t, int i) {
    if (i < 1 || i > t.dim()) {
        throw InvalidArgument("row " + std::to_string(i) + " outside 1.." +
                              std::to_string(t.dim()));
    }
}

void require_pairs(const Tensor& t, std::string_view what) {
    if (t.dim() < 2) {
        throw InvalidArgument(std::string(what) + " needs dim >= 2 (no index pairs when dim = 1)");
    }
}

bool strict_holds(double lhs, double rhs, double margin) { return lhs - rhs > margin; }
bool weak_holds(double lhs, double rhs, double margin) { return lhs - rhs >= margin; }

Verdict fail(std::string condition, int i, std::optional<int> j, double lhs, double rhs) {
    Verdict v;
    v.status = Status::Fails;
    v.witness = Witness{std::move(condition), i, j, std::nullopt, lhs, rhs};
    return v;
}

// Sum of (beta_j - b) over the off-diagonal slots of row j, skipping the
// slot at `skip` (row-local offset) when given.
double beta_deficit_sum(std::span<const double> row, std::size_t diag, double beta,
                        std::optional<std::size_t> skip) {
    double acc = 0.0;
    for (std::size_t q = 0; q < row.size(); ++q) {
        if (q == diag || (skip && q == *skip)) continue;
        acc += beta - row[q];
    }
    return acc;
}

double abs_sum(std::span<const double> row, std::size_t diag, std::optional<std::size_t> skip) {
    double acc = 0.0;
    for (std::size_t q = 0; q < row.size(); ++q) {
        if (q == diag || (skip && q == *skip)) continue;
        acc += std::abs(row[q]);
    }
    return acc;
}

// Checks b_{i...i} > beta_i for every row.
std::optional<Verdict> diagonal_exceeds_beta(const std::vector<RowStats>& rows, double margin) {
    for (const auto& s : rows) {
        if (!strict_holds(s.diagonal, s.beta, margin)) {
            return fail("diagonal_exceeds_beta", s.row, std::nullopt, s.diagonal, s.beta);
        }
    }
    return std::nullopt;
}

// Pairwise condition with (i,j) ordered; shared by the quasi-double B and B0
// classes.
std::optional<Verdict> quasi_pairs(const Tensor& t, const std::vector<RowStats>& rows,
                                   double margin, bool strict) {
    const int n = t.dim();
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            const RowStats& si = rows[i - 1];
            const RowStats& sj = rows[j - 1];
            const PairStats p = pair_stats(t, i, j);
            const double lhs = (si.diagonal - si.beta) * (sj.diagonal - sj.beta - p.delta_j_i);
            const double rhs = (sj.beta - p.tail) * si.delta;
            const bool ok = strict ? strict_holds(lhs, rhs, margin) : weak_holds(lhs, rhs, margin);
            if (!ok) return fail(strict ? "quasi_pair" : "quasi_pair_weak", i, j, lhs, rhs);
        }
    }
    return std::nullopt;
}

std::optional<Verdict> product_pairs(const std::vector<RowStats>& rows, double margin) {
    const int n = static_cast<int>(rows.size());
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const RowStats& si = rows[i - 1];
            const RowStats& sj = rows[j - 1];
            const double lhs = (si.diagonal - si.beta) * (sj.diagonal - sj.beta);
            const double rhs = si.delta * sj.delta;
            if (!strict_holds(lhs, rhs, margin)) return fail("product", i, j, lhs, rhs);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string Witness::describe() const {
    std::ostringstream out;
    out.precision(17);
    out << condition << " at ";
    if (index) {
        out << index->to_string();
    } else if (j) {
        out << "(i=" << i << ", j=" << *j << ")";
    } else {
        out << "i=" << i;
    }
    out << ": lhs " << lhs << ", rhs " << rhs;
    return out.str();
}

std::string_view class_name(TensorClass c) {
    switch (c) {
        case TensorClass::B: return "B";
        case TensorClass::DoubleB: return "DoubleB";
        case TensorClass::QuasiDoubleB: return "QuasiDoubleB";
        case TensorClass::QuasiDoubleB0: return "QuasiDoubleB0";
        case TensorClass::Z: return "Z";
        case TensorClass::DSDD: return "DSDD";
        case TensorClass::QDSDD: return "QDSDD";
        case TensorClass::ProductIneq: return "ProductIneq";
    }
    return "?";
}

std::optional<TensorClass> class_from_name(std::string_view name) {
    for (TensorClass c : kAllClasses) {
        if (class_name(c) == name) return c;
    }
    return std::nullopt;
}

RowStats row_stats(const Tensor& t, int i) {
    check_row(t, i);
    const auto row = t.row(i - 1);
    const std::size_t diag = t.diagonal_offset_in_row(i - 1);
    RowStats s;
    s.row = i;
    s.diagonal = row[diag];
    double max_off = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t q = 0; q < row.size(); ++q) {
        sum += row[q];
        if (q != diag) max_off = std::max(max_off, row[q]);
    }
    s.row_sum = sum;
    // With dim 1 there are no off-diagonal slots; the max over an empty set
    // is taken as 0 so beta stays max(0, .).
    s.max_offdiagonal = row.size() > 1 ? max_off : 0.0;
    s.beta = std::max(0.0, s.max_offdiagonal);
    s.delta = beta_deficit_sum(row, diag, s.beta, std::nullopt);
    s.r = abs_sum(row, diag, std::nullopt);
    return s;
}

std::vector<RowStats> all_row_stats(const Tensor& t) {
    std::vector<RowStats> rows;
    rows.reserve(t.dim());
    for (int i = 1; i <= t.dim(); ++i) rows.push_back(row_stats(t, i));
    return rows;
}

PairStats pair_stats(const Tensor& t, int i, int j) {
    check_row(t, i);
    check_row(t, j);
    if (i == j) throw InvalidArgument("pair statistics need i != j, got i = j = " + std::to_string(i));
    const auto row = t.row(j - 1);
    const std::size_t diag = t.diagonal_offset_in_row(j - 1);
    const std::size_t tail_pos = t.diagonal_offset_in_row(i - 1);
    const RowStats sj = row_stats(t, j);
    PairStats p;
    p.i = i;
    p.j = j;
    p.tail = row[tail_pos];
    p.delta_j_i = beta_deficit_sum(row, diag, sj.beta, tail_pos);
    p.r_j_i = abs_sum(row, diag, tail_pos);
    return p;
}

BTensorForms b_tensor_forms(const Tensor& t) {
    BTensorForms forms{true, true, true};
    const double row_len = static_cast<double>(t.row_length());
    for (int i = 1; i <= t.dim(); ++i) {
        const RowStats s = row_stats(t, i);
        const auto row = t.row(i - 1);
        const std::size_t diag = t.diagonal_offset_in_row(i - 1);

        bool def = s.row_sum > 0.0;
        const double mean = s.row_sum / row_len;
        for (std::size_t q = 0; q < row.size() && def; ++q) {
            if (q != diag && !(mean > row[q])) def = false;
        }
        forms.definition = forms.definition && def;
        forms.row_sum_bound = forms.row_sum_bound && (s.row_sum > row_len * s.beta);
        forms.dominance = forms.dominance && (s.diagonal - s.beta > s.delta);
    }
    return forms;
}

Verdict is_B_tensor(const Tensor& t, const ClassifyOptions& options) {
    Verdict v;
    for (int i = 1; i <= t.dim(); ++i) {
        const RowStats s = row_stats(t, i);
        if (!strict_holds(s.diagonal - s.beta, s.delta, options.margin)) {
            v = fail("diagonal_dominance", i, std::nullopt, s.diagonal - s.beta, s.delta);
            break;
        }
    }
    if (options.margin == 0.0) {
        const BTensorForms forms = b_tensor_forms(t);
        if (forms.definition != forms.row_sum_bound || forms.definition != forms.dominance) {
            v.notes.push_back("B-tensor formulations disagree (rounding at the class boundary)");
        }
    }
    return v;
}

Verdict product_inequality(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "product inequality");
    const auto rows = all_row_stats(t);
    if (auto failed = product_pairs(rows, options.margin)) return *failed;
    return {};
}

Verdict is_double_B_tensor(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "double B-tensor test");
    const auto rows = all_row_stats(t);
    if (auto failed = diagonal_exceeds_beta(rows, options.margin)) return *failed;
    for (const auto& s : rows) {
        if (!weak_holds(s.diagonal - s.beta, s.delta, options.margin)) {
            return fail("row_dominance", s.row, std::nullopt, s.diagonal - s.beta, s.delta);
        }
    }
    if (auto failed = product_pairs(rows, options.margin)) return *failed;
    return {};
}

Verdict is_quasi_double_B_tensor(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "quasi-double B-tensor test");
    const auto rows = all_row_stats(t);
    if (auto failed = diagonal_exceeds_beta(rows, options.margin)) return *failed;
    if (auto failed = quasi_pairs(t, rows, options.margin, true)) return *failed;
    return {};
}

Verdict is_quasi_double_B0_tensor(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "quasi-double B0-tensor test");
    const auto rows = all_row_stats(t);
    if (options.b0_diagonal_condition) {
        for (const auto& s : rows) {
            if (!weak_holds(s.diagonal, s.beta, options.margin)) {
                return fail("diagonal_at_least_beta", s.row, std::nullopt, s.diagonal, s.beta);
            }
        }
    }
    if (auto failed = quasi_pairs(t, rows, options.margin, false)) return *failed;
    return {};
}

Verdict is_Z_tensor(const Tensor& t) {
    for (int i = 0; i < t.dim(); ++i) {
        const auto row = t.row(i);
        const std::size_t diag = t.diagonal_offset_in_row(i);
        for (std::size_t q = 0; q < row.size(); ++q) {
            if (q != diag && row[q] > 0.0) {
                Verdict v = fail("offdiagonal_nonpositive", i + 1, std::nullopt, row[q], 0.0);
                v.witness->index = t.index_of(i * t.row_length() + q);
                return v;
            }
        }
    }
    return {};
}

Verdict is_DSDD(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "DSDD test");
    const auto rows = all_row_stats(t);
    if (t.order() > 2) {
        for (const auto& s : rows) {
            if (!weak_holds(std::abs(s.diagonal), s.r, options.margin)) {
                return fail("row_dominance_abs", s.row, std::nullopt, std::abs(s.diagonal), s.r);
            }
        }
    }
    const int n = t.dim();
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const double lhs = std::abs(rows[i - 1].diagonal) * std::abs(rows[j - 1].diagonal);
            const double rhs = rows[i - 1].r * rows[j - 1].r;
            if (!strict_holds(lhs, rhs, options.margin)) return fail("abs_product", i, j, lhs, rhs);
        }
    }
    return {};
}

Verdict is_QDSDD(const Tensor& t, const ClassifyOptions& options) {
    require_pairs(t, "Q-DSDD test");
    const auto rows = all_row_stats(t);
    const int n = t.dim();
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (i == j) continue;
            const PairStats p = pair_stats(t, i, j);
            const double lhs =
                std::abs(rows[i - 1].diagonal) * (std::abs(rows[j - 1].diagonal) - p.r_j_i);
            const double rhs = rows[i - 1].r * std::abs(p.tail);
            if (!strict_holds(lhs, rhs, options.margin)) return fail("abs_quasi_pair", i, j, lhs, rhs);
        }
    }
    return {};
}

Verdict evaluate(TensorClass c, const Tensor& t, const ClassifyOptions& options) {
    switch (c) {
        case TensorClass::B: return is_B_tensor(t, options);
        case TensorClass::DoubleB: return is_double_B_tensor(t, options);
        case TensorClass::QuasiDoubleB: return is_quasi_double_B_tensor(t, options);
        case TensorClass::QuasiDoubleB0: return is_quasi_double_B0_tensor(t, options);
        case TensorClass::Z: return is_Z_tensor(t);
        case TensorClass::DSDD: return is_DSDD(t, options);
        case TensorClass::QDSDD: return is_QDSDD(t, options);
        case TensorClass::ProductIneq: return product_inequality(t, options);
    }
    throw InvalidArgument("unknown tensor class");
}

const Verdict& ClassReport::verdict(TensorClass c) const {
    for (const auto& [cls, v] : verdicts) {
        if (cls == c) return v;
    }
    throw InvalidArgument("report has no verdict for " + std::string(class_name(c)));
}

ClassReport classify_all(const Tensor& t, const ClassifyOptions& options) {
    ClassReport report;
    report.order = t.order();
    report.dim = t.dim();
    report.symmetric = is_symmetric(t);
    report.even_order = t.order() % 2 == 0;
    report.margin = options.margin;
    report.rows = all_row_stats(t);

    for (TensorClass c : kAllClasses) {
        Verdict v;
        try {
            v = evaluate(c, t, options);
        } catch (const InvalidArgument& e) {
            v.status = Status::Inapplicable;
            v.notes.push_back(e.what());
        }
        report.verdicts.emplace_back(c, std::move(v));
    }

    if (options.margin == 0.0) {
        const std::pair<TensorClass, TensorClass> implications[] = {
            {TensorClass::B, TensorClass::DoubleB},
            {TensorClass::B, TensorClass::QuasiDoubleB},
            {TensorClass::DoubleB, TensorClass::QuasiDoubleB},
            {TensorClass::QuasiDoubleB, TensorClass::QuasiDoubleB0},
            {TensorClass::DoubleB, TensorClass::ProductIneq},
        };
        for (const auto& [from, to] : implications) {
            const Verdict& a = report.verdict(from);
            const Verdict& b = report.verdict(to);
            if (b.status == Status::Inapplicable) continue;
            if (a.holds() && !b.holds()) {
                report.chain_violations.push_back(std::string(class_name(from)) + " holds but " +
                                                  std::string(class_name(to)) + " fails");
            }
        }
    }
    return report;
}

}  // namespace btensor
