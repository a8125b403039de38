#include "btensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "btensor/error.hpp"

namespace btensor {

namespace {

constexpr std::size_t kMaxEntries = std::size_t{1} << 28;

std::size_t checked_power(int base, int exponent) {
    std::size_t result = 1;
    for (int k = 0; k < exponent; ++k) {
        if (result > kMaxEntries / static_cast<std::size_t>(base)) {
            throw InvalidArgument("tensor too large: " + std::to_string(base) + "^" +
                                  std::to_string(exponent) + " entries");
        }
        result *= static_cast<std::size_t>(base);
    }
    return result;
}

void check_shape(int order, int dim) {
    if (order < 2) throw InvalidArgument("order must be >= 2, got " + std::to_string(order));
    if (dim < 1) throw InvalidArgument("dim must be >= 1, got " + std::to_string(dim));
}

// Contracts the trailing index of a dense block against x, `times` times.
std::vector<double> contract_trailing(std::span<const double> data, std::span<const double> x,
                                      int times) {
    const std::size_t n = x.size();
    std::vector<double> current(data.begin(), data.end());
    for (int k = 0; k < times; ++k) {
        std::vector<double> next(current.size() / n, 0.0);
        for (std::size_t p = 0; p < next.size(); ++p) {
            double acc = 0.0;
            const double* block = current.data() + p * n;
            for (std::size_t q = 0; q < n; ++q) acc += block[q] * x[q];
            next[p] = acc;
        }
        current = std::move(next);
    }
    return current;
}

void check_vector(const Tensor& t, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(t.dim())) {
        throw InvalidArgument("vector length " + std::to_string(x.size()) +
                              " does not match tensor dimension " + std::to_string(t.dim()));
    }
}

// Flat offset of the index obtained by sorting `offset`'s components.
std::size_t sorted_offset(std::size_t offset, int order, int dim, std::vector<int>& scratch) {
    scratch.resize(order);
    for (int k = order - 1; k >= 0; --k) {
        scratch[k] = static_cast<int>(offset % dim);
        offset /= dim;
    }
    std::sort(scratch.begin(), scratch.end());
    std::size_t out = 0;
    for (int v : scratch) out = out * dim + v;
    return out;
}

}  // namespace

bool MultiIndex::is_diagonal() const noexcept {
    return std::adjacent_find(indices_.begin(), indices_.end(), std::not_equal_to<>()) ==
           indices_.end();
}

std::string MultiIndex::to_string() const {
    std::ostringstream out;
    out << '(';
    for (std::size_t k = 0; k < indices_.size(); ++k) out << (k ? "," : "") << indices_[k];
    out << ')';
    return out.str();
}

IndexSubset::IndexSubset(std::vector<int> members, int dim) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    for (std::size_t k = 0; k < members_.size(); ++k) {
        if (members_[k] < 1 || members_[k] > dim) {
            throw InvalidArgument("subset member " + std::to_string(members_[k]) +
                                  " outside 1.." + std::to_string(dim));
        }
        if (k > 0 && members_[k] == members_[k - 1]) {
            throw InvalidArgument("duplicate subset member " + std::to_string(members_[k]));
        }
    }
}

bool IndexSubset::contains(int i) const noexcept {
    return std::binary_search(members_.begin(), members_.end(), i);
}

bool IndexSubset::is_strict_subset_of(const IndexSubset& other) const {
    return size() < other.size() &&
           std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
}

std::string IndexSubset::to_string() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t k = 0; k < members_.size(); ++k) out << (k ? "," : "") << members_[k];
    out << '}';
    return out.str();
}

Tensor::Tensor(int order, int dim) : Tensor(order, dim, std::vector<double>()) {}

Tensor::Tensor(int order, int dim, std::vector<double> entries)
    : order_(order), dim_(dim), entries_(std::move(entries)) {
    check_shape(order, dim);
    const std::size_t total = checked_power(dim, order);
    if (entries_.empty()) entries_.assign(total, 0.0);
    if (entries_.size() != total) {
        throw InvalidArgument("expected " + std::to_string(total) + " entries, got " +
                              std::to_string(entries_.size()));
    }
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (!std::isfinite(entries_[k])) {
            throw InvalidArgument("non-finite entry at flat offset " + std::to_string(k));
        }
    }
    row_length_ = total / dim;
    diag_stride_ = 0;
    std::size_t p = 1;
    for (int k = 0; k < order - 1; ++k) {
        diag_stride_ += p;
        p *= dim;
    }
}

double Tensor::at(const MultiIndex& index) const { return entries_[offset_of(index)]; }

std::span<const double> Tensor::row(int i) const {
    return std::span<const double>(entries_).subspan(i * row_length_, row_length_);
}

std::size_t Tensor::offset_of(const MultiIndex& index) const {
    if (index.size() != static_cast<std::size_t>(order_)) {
        throw InvalidArgument("multi-index " + index.to_string() + " has length " +
                              std::to_string(index.size()) + ", expected " +
                              std::to_string(order_));
    }
    std::size_t out = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        const int v = index[k];
        if (v < 1 || v > dim_) {
            throw InvalidArgument("index " + std::to_string(v) + " in " + index.to_string() +
                                  " outside 1.." + std::to_string(dim_));
        }
        out = out * dim_ + (v - 1);
    }
    return out;
}

MultiIndex Tensor::index_of(std::size_t offset) const {
    std::vector<int> idx(order_);
    for (int k = order_ - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(offset % dim_) + 1;
        offset /= dim_;
    }
    return MultiIndex(std::move(idx));
}

Tensor make_tensor(int order, int dim, std::span<const std::pair<MultiIndex, double>> entries) {
    Tensor shape(order, dim);
    std::vector<double> data(shape.size(), 0.0);
    std::unordered_map<std::size_t, std::size_t> seen;
    for (std::size_t pos = 0; pos < entries.size(); ++pos) {
        const auto& [index, value] = entries[pos];
        const std::size_t offset = shape.offset_of(index);
        auto [it, inserted] = seen.emplace(offset, pos);
        if (!inserted) {
            throw InvalidArgument("duplicate multi-index " + index.to_string() +
                                  " at list positions " + std::to_string(it->second) + " and " +
                                  std::to_string(pos));
        }
        data[offset] = value;
    }
    return Tensor(order, dim, std::move(data));
}

Tensor make_tensor(int order, int dim,
                   std::initializer_list<std::pair<MultiIndex, double>> entries) {
    return make_tensor(order, dim,
                       std::span<const std::pair<MultiIndex, double>>(entries.begin(),
                                                                      entries.size()));
}

Tensor unit_tensor(int order, int dim) {
    Tensor shape(order, dim);
    std::vector<double> data(shape.size(), 0.0);
    for (int i = 0; i < dim; ++i) data[i * shape.row_length() + shape.diagonal_offset_in_row(i)] = 1.0;
    return Tensor(order, dim, std::move(data));
}

Tensor partially_all_one(int order, int dim, const IndexSubset& members) {
    if (members.empty()) throw InvalidArgument("partially all one tensor needs a nonempty set");
    if (members.members().back() > dim) {
        throw InvalidArgument("subset " + members.to_string() + " exceeds dimension " +
                              std::to_string(dim));
    }
    Tensor shape(order, dim);
    std::vector<bool> in_set(dim, false);
    for (int i : members.members()) in_set[i - 1] = true;
    std::vector<double> data(shape.size(), 0.0);
    for (std::size_t offset = 0; offset < data.size(); ++offset) {
        std::size_t rest = offset;
        bool all_in = true;
        for (int k = 0; k < order && all_in; ++k) {
            all_in = in_set[rest % dim];
            rest /= dim;
        }
        if (all_in) data[offset] = 1.0;
    }
    return Tensor(order, dim, std::move(data));
}

std::optional<std::pair<MultiIndex, MultiIndex>> symmetry_violation(const Tensor& t) {
    std::vector<int> scratch;
    for (std::size_t offset = 0; offset < t.size(); ++offset) {
        const std::size_t canonical = sorted_offset(offset, t.order(), t.dim(), scratch);
        if (t[offset] != t[canonical]) return std::make_pair(t.index_of(offset), t.index_of(canonical));
    }
    return std::nullopt;
}

bool is_symmetric(const Tensor& t) { return !symmetry_violation(t).has_value(); }

Tensor symmetrize(const Tensor& t) {
    std::vector<int> scratch;
    std::vector<std::size_t> canonical(t.size());
    std::unordered_map<std::size_t, std::pair<double, int>> orbit;
    for (std::size_t offset = 0; offset < t.size(); ++offset) {
        canonical[offset] = sorted_offset(offset, t.order(), t.dim(), scratch);
        auto& [sum, count] = orbit[canonical[offset]];
        sum += t[offset];
        ++count;
    }
    std::vector<double> data(t.size());
    for (std::size_t offset = 0; offset < t.size(); ++offset) {
        const auto& [sum, count] = orbit[canonical[offset]];
        data[offset] = sum / count;
    }
    return Tensor(t.order(), t.dim(), std::move(data));
}

double form_value(const Tensor& t, std::span<const double> x) {
    check_vector(t, x);
    return contract_trailing(t.entries(), x, t.order()).front();
}

std::vector<double> apply(const Tensor& t, std::span<const double> x) {
    check_vector(t, x);
    return contract_trailing(t.entries(), x, t.order() - 1);
}

Tensor linear_combine(const Tensor& t, const Tensor& u, double c) {
    if (t.order() != u.order() || t.dim() != u.dim()) {
        throw InvalidArgument("shape mismatch: order " + std::to_string(t.order()) + " dim " +
                              std::to_string(t.dim()) + " vs order " + std::to_string(u.order()) +
                              " dim " + std::to_string(u.dim()));
    }
    std::vector<double> data(t.size());
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = t[k] + c * u[k];
    return Tensor(t.order(), t.dim(), std::move(data));
}

Tensor scaled(const Tensor& t, double c) {
    std::vector<double> data(t.entries().begin(), t.entries().end());
    for (double& v : data) v *= c;
    return Tensor(t.order(), t.dim(), std::move(data));
}

}  // namespace btensor
