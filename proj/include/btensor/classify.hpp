#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btensor/tensor.hpp"

namespace btensor {

/// Per-row statistics of row i (1-based).
///
/// beta is max(0, largest off-diagonal entry), delta the sum of
/// (beta - entry) over the off-diagonal slots, r the sum of their absolute
/// values and row_sum the sum of all n^{m-1} entries of the row.
struct RowStats {
    int row = 0;
    double diagonal = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double r = 0.0;
    double row_sum = 0.0;
    double max_offdiagonal = 0.0;
};

/// Statistics for the ordered pair (i, j), i != j (1-based).
///
/// tail is b_{j i ... i}; delta_j_i drops that entry's term from delta_j
/// and r_j_i drops |tail| from r_j.
struct PairStats {
    int i = 0;
    int j = 0;
    double delta_j_i = 0.0;
    double r_j_i = 0.0;
    double tail = 0.0;
};

RowStats row_stats(const Tensor& t, int i);
std::vector<RowStats> all_row_stats(const Tensor& t);
PairStats pair_stats(const Tensor& t, int i, int j);

enum class TensorClass { B, DoubleB, QuasiDoubleB, QuasiDoubleB0, Z, DSDD, QDSDD, ProductIneq };

inline constexpr std::array<TensorClass, 8> kAllClasses = {
    TensorClass::B,  TensorClass::DoubleB, TensorClass::QuasiDoubleB, TensorClass::QuasiDoubleB0,
    TensorClass::Z,  TensorClass::DSDD,    TensorClass::QDSDD,        TensorClass::ProductIneq};

std::string_view class_name(TensorClass c);
std::optional<TensorClass> class_from_name(std::string_view name);

/// The violated inequality behind a negative verdict: which condition,
/// where (row i, pair (i, j) or a full multi-index) and both sides.
struct Witness {
    std::string condition;
    int i = 0;
    std::optional<int> j;
    std::optional<MultiIndex> index;
    double lhs = 0.0;
    double rhs = 0.0;

    std::string describe() const;
    friend bool operator==(const Witness&, const Witness&) = default;
};

enum class Status { Holds, Fails, Inapplicable };

struct Verdict {
    Status status = Status::Holds;
    std::optional<Witness> witness;
    std::vector<std::string> notes;

    bool holds() const noexcept { return status == Status::Holds; }
    explicit operator bool() const noexcept { return holds(); }
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct ClassifyOptions {
    /// A strict inequality lhs > rhs passes only when lhs - rhs > margin;
    /// a weak one lhs >= rhs only when lhs - rhs >= margin.
    double margin = 0.0;
    /// Adds b_{i...i} >= beta_i to the weak pairwise (B0) class.
    bool b0_diagonal_condition = false;
};

/// Verdicts of the three equivalent B-tensor formulations.
struct BTensorForms {
    bool definition = false;    // row sum positive and row mean above every off-diagonal entry
    bool row_sum_bound = false;  // row sum > n^{m-1} beta_i
    bool dominance = false;      // b_{i...i} - beta_i > Delta_i
};

BTensorForms b_tensor_forms(const Tensor& t);

Verdict is_B_tensor(const Tensor& t, const ClassifyOptions& options = {});
/// Pairwise product condition on beta-shifted diagonals; needs dim >= 2.
Verdict product_inequality(const Tensor& t, const ClassifyOptions& options = {});
Verdict is_double_B_tensor(const Tensor& t, const ClassifyOptions& options = {});
Verdict is_quasi_double_B_tensor(const Tensor& t, const ClassifyOptions& options = {});
Verdict is_quasi_double_B0_tensor(const Tensor& t, const ClassifyOptions& options = {});
Verdict is_Z_tensor(const Tensor& t);
Verdict is_DSDD(const Tensor& t, const ClassifyOptions& options = {});
Verdict is_QDSDD(const Tensor& t, const ClassifyOptions& options = {});

Verdict evaluate(TensorClass c, const Tensor& t, const ClassifyOptions& options = {});

struct ClassReport {
    int order = 0;
    int dim = 0;
    bool symmetric = false;
    bool even_order = false;
    double margin = 0.0;
    std::vector<RowStats> rows;
    std::vector<std::pair<TensorClass, Verdict>> verdicts;
    /// Implications between classes that failed to hold on this input.
    /// Always empty unless floating-point rounding sits on a class boundary.
    std::vector<std::string> chain_violations;

    const Verdict& verdict(TensorClass c) const;
    bool holds(TensorClass c) const { return verdict(c).holds(); }
};

/// Runs every predicate; pairwise classes are Inapplicable when dim == 1.
/// At margin 0 the class implications are checked and any failure is
/// recorded in chain_violations.
ClassReport classify_all(const Tensor& t, const ClassifyOptions& options = {});

}  // namespace btensor
