#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btensor/tensor.hpp"

namespace btensor {

/// Which sphere a minimizer lives on.
enum class Normalization {
    TwoNorm,    // ||x||_2 = 1, used for the positive definiteness decision
    OrderNorm,  // ||x||_m = 1, where min A x^m is the least H-eigenvalue
};

std::string_view normalization_name(Normalization n);
std::optional<Normalization> normalization_from_name(std::string_view name);

struct OracleOptions {
    /// Random starts; 0 picks the default (16 when dim = 2, else 256).
    int starts = 0;
    std::uint64_t seed = 0;
    /// Angular grid size used when dim = 2.
    int grid_points = 100000;
    int max_iterations = 10000;
    double gradient_tolerance = 1e-10;
};

/// Best point found by the multistart sphere search.
///
/// This is numerical evidence: a positive minimum means no violation was
/// found, not that the form is positive definite.
struct OracleResult {
    double min_value = 0.0;
    std::vector<double> minimizer;
    Normalization normalization = Normalization::TwoNorm;
    /// Set by lambda_min searches: min of A x^m over ||x||_m = 1.
    std::optional<double> lambda_min_estimate;
    std::int64_t samples = 0;
    bool converged = false;

    friend bool operator==(const OracleResult&, const OracleResult&) = default;
};

/// Minimizes A x^m over the unit 2-sphere. Non-symmetric inputs are
/// symmetrized first (the form only sees the symmetric part).
///
/// Runs projected gradient descent with backtracking from seeded random
/// starts, every signed axis point and the normalized all-ones vector; for
/// dim 2 an angular grid with golden-section refinement is swept as well.
/// Deterministic for a given seed.
OracleResult sphere_minimize(const Tensor& t, const OracleOptions& options = {});

/// Minimizes A x^m over ||x||_m = 1 for even order. For symmetric tensors
/// this is the least H-eigenvalue; the value is an upper bound on it that
/// the search drives down. Throws InvalidArgument for odd order.
OracleResult lambda_min_search(const Tensor& t, const OracleOptions& options = {});
double lambda_min_estimate(const Tensor& t, const OracleOptions& options = {});

/// One quasi-double B0 sample whose form dipped below -tolerance.
struct SearchCandidate {
    std::int64_t trial = 0;
    std::uint64_t trial_seed = 0;
    Tensor tensor{2, 1};
    OracleResult oracle;
};

struct SearchReport {
    int order = 0;
    int dim = 0;
    std::int64_t trials = 0;
    std::int64_t attempts = 0;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> generator_params;
    std::vector<SearchCandidate> candidates;
    /// Smallest oracle minimum seen over all accepted samples.
    double worst_min_value = 0.0;
};

struct SearchOptions {
    int order = 4;
    int dim = 2;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    double tolerance = 1e-6;
    OracleOptions oracle;
};

/// Randomized probe of the claim that even-order symmetric quasi-double B0
/// tensors are positive semi-definite.
///
/// Each trial draws a symmetrized tensor with off-diagonal entries in
/// [-1, 1] and places the diagonal on the boundary of the weak pairwise
/// condition. Samples that are quasi-double B0 but not quasi-double B are
/// sphere-minimized; `trials` counts such accepted samples. Trial k is
/// reproducible from its trial seed alone.
SearchReport conjecture_search(const SearchOptions& options);

/// Generates the sample for one trial seed; empty when the draw is rejected.
std::optional<Tensor> boundary_sample(int order, int dim, std::uint64_t trial_seed);

/// Seed of trial `attempt` under master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::int64_t attempt);

}  // namespace btensor
