#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace btensor {

/// Multi-index (i_1, ..., i_m) with 1-based components.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {}
    MultiIndex(std::initializer_list<int> indices) : indices_(indices) {}

    std::size_t size() const noexcept { return indices_.size(); }
    int operator[](std::size_t k) const { return indices_[k]; }
    const std::vector<int>& indices() const noexcept { return indices_; }

    /// True iff all components are equal (the Kronecker delta is 1).
    bool is_diagonal() const noexcept;

    std::string to_string() const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<int> indices_;
};

/// Nonempty set of 1-based row indices, kept sorted and duplicate free.
class IndexSubset {
public:
    IndexSubset() = default;
    /// Throws InvalidArgument on duplicates or indices outside {1..dim}.
    IndexSubset(std::vector<int> members, int dim);

    const std::vector<int>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(int i) const noexcept;
    /// Proper subset test.
    bool is_strict_subset_of(const IndexSubset& other) const;

    std::string to_string() const;

    friend bool operator==(const IndexSubset&, const IndexSubset&) = default;

private:
    std::vector<int> members_;
};

/// Dense real tensor of order m and dimension n.
///
/// Entries are stored row-major in multi-index order with i_1 varying
/// slowest, so the n^{m-1} entries of row i (first index fixed) are
/// contiguous. Instances are immutable once built.
class Tensor {
public:
    /// Zero tensor. Throws InvalidArgument unless order >= 2 and dim >= 1.
    Tensor(int order, int dim);
    /// Takes ownership of a dense entry array of length dim^order.
    /// Rejects wrong lengths and non-finite values.
    Tensor(int order, int dim, std::vector<double> entries);

    int order() const noexcept { return order_; }
    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::span<const double> entries() const noexcept { return entries_; }

    /// Entry at a 1-based multi-index.
    double at(const MultiIndex& index) const;
    /// Entry at a 0-based flat offset.
    double operator[](std::size_t offset) const { return entries_[offset]; }

    /// Number of entries per row, n^{m-1}.
    std::size_t row_length() const noexcept { return row_length_; }
    /// Entries of 0-based row i.
    std::span<const double> row(int i) const;
    /// Position of the diagonal entry b_{i...i} inside row i (0-based i).
    std::size_t diagonal_offset_in_row(int i) const noexcept { return i * diag_stride_; }
    /// Diagonal entry b_{i...i}, 0-based i.
    double diagonal(int i) const { return row(i)[diagonal_offset_in_row(i)]; }
    /// Entry b_{j i ... i} (first index j, the remaining m-1 all i), 0-based.
    double tail_entry(int j, int i) const { return row(j)[diagonal_offset_in_row(i)]; }

    /// Flat offset of a 1-based multi-index; throws on bad shape or range.
    std::size_t offset_of(const MultiIndex& index) const;
    /// 1-based multi-index of a flat offset.
    MultiIndex index_of(std::size_t offset) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    int order_;
    int dim_;
    std::size_t row_length_;
    std::size_t diag_stride_;  // 1 + n + ... + n^{m-2}
    std::vector<double> entries_;
};

/// Builds a tensor from (index, value) pairs; unlisted entries are zero.
/// Rejects duplicate or out-of-range indices, naming the offender.
Tensor make_tensor(int order, int dim, std::span<const std::pair<MultiIndex, double>> entries);
Tensor make_tensor(int order, int dim, std::initializer_list<std::pair<MultiIndex, double>> entries);

/// Unit tensor: delta_{i_1...i_m}.
Tensor unit_tensor(int order, int dim);

/// Partially all one tensor: 1 where every index lies in `members`, else 0.
/// With members = {1..n} this is the all one tensor.
Tensor partially_all_one(int order, int dim, const IndexSubset& members);

/// Exact symmetry check under all index permutations.
bool is_symmetric(const Tensor& t);

/// First entry that differs from a permutation of itself, as
/// (index, permuted index). Empty when the tensor is symmetric.
std::optional<std::pair<MultiIndex, MultiIndex>> symmetry_violation(const Tensor& t);

/// Average over all index permutations. The result is exactly symmetric.
Tensor symmetrize(const Tensor& t);

/// Homogeneous form A x^m.
double form_value(const Tensor& t, std::span<const double> x);

/// Vector A x^{m-1}: contraction of the last m-1 slots.
std::vector<double> apply(const Tensor& t, std::span<const double> x);

/// Entrywise t + c * u.
Tensor linear_combine(const Tensor& t, const Tensor& u, double c);

/// Same tensor scaled by c.
Tensor scaled(const Tensor& t, double c);

}  // namespace btensor
