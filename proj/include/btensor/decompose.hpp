#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btensor/classify.hpp"
#include "btensor/oracle.hpp"
#include "btensor/tensor.hpp"

namespace btensor {

/// Entry class a decomposition starts from. The subtraction loop is the
/// same for both; only the precondition and the residual's class differ.
enum class DecomposeMode {
    Quasi,   // quasi-double B input, Q-DSDD residual
    Double,  // double B input, DSDD residual
};

std::string_view mode_name(DecomposeMode mode);
std::optional<DecomposeMode> mode_from_name(std::string_view name);

struct DecompositionStep {
    double h = 0.0;
    /// Rows holding at least one positive off-diagonal entry before the step.
    IndexSubset rows;
    /// Rows whose largest off-diagonal entry equals h; they leave the set.
    IndexSubset exhausted;
};

/// B = M + sum_k h_k * ones(J_k), with M a symmetric Z-tensor.
/// steps is empty (s = 0) when B already is a Z-tensor.
struct Decomposition {
    DecomposeMode mode = DecomposeMode::Quasi;
    Tensor residual{2, 1};
    std::vector<DecompositionStep> steps;

    std::size_t s() const noexcept { return steps.size(); }
};

struct DecomposeOptions {
    DecomposeMode mode = DecomposeMode::Quasi;
    /// Re-run the class predicate on every intermediate tensor.
    bool verify_steps = true;
};

/// Peels partially all one terms off a symmetric (quasi-)double B-tensor
/// until no row has a positive off-diagonal entry.
///
/// Throws PreconditionError for non-symmetric inputs or inputs outside the
/// mode's class, and std::logic_error if a per-step invariant breaks
/// (beta shift, index containment, class preservation, reconstruction).
Decomposition decompose(const Tensor& t, const DecomposeOptions& options = {});

/// M + sum_k h_k * ones(J_k).
Tensor reconstruct(const Decomposition& d);

enum class PdVerdict { PositiveDefinite, NotPositiveDefinite, Inconclusive };

std::string_view verdict_name(PdVerdict v);
std::optional<PdVerdict> verdict_from_name(std::string_view name);

struct Certificate {
    PdVerdict verdict = PdVerdict::Inconclusive;
    /// Identifier of the rule that settled the verdict, empty when none did.
    std::string route;
    /// Facts established on the way, in order.
    std::vector<std::string> justification;
    std::optional<Decomposition> decomposition;
    std::optional<OracleResult> oracle;
    /// Vector with A x^m <= 0, present for NotPositiveDefinite.
    std::optional<std::vector<double>> witness;
    /// Every rule that applies (filled only in verbose mode).
    std::vector<std::string> all_routes;
    std::vector<std::string> notes;
};

struct CertifyOptions {
    double margin = 0.0;
    /// Fall back to the sphere search when no rule fires; with a
    /// PositiveDefinite verdict the search result is attached as evidence.
    bool use_oracle = false;
    OracleOptions oracle;
    bool verbose = false;
};

/// Route identifiers, tried in this order.
inline constexpr std::string_view kRouteB = "symmetric-even-B";
inline constexpr std::string_view kRouteDoubleB = "symmetric-even-double-B";
inline constexpr std::string_view kRouteQuasiDoubleB = "symmetric-even-quasi-double-B";
inline constexpr std::string_view kRouteDSDD = "symmetric-even-DSDD";
inline constexpr std::string_view kRouteQDSDD = "symmetric-even-QDSDD-pivot";
inline constexpr std::string_view kRouteOracle = "oracle-witness";

/// Index i (1-based) with |a_ii| >= r_i and the absolute pairwise
/// condition for every (i, j), j != i; the pivot hypothesis under which a
/// symmetric even-order tensor with positive diagonal is positive definite.
std::optional<int> qdsdd_pivot(const Tensor& t, double margin = 0.0);

Certificate pd_certify(const Tensor& t, const CertifyOptions& options = {});

struct HEigenReport {
    TensorClass certified_class = TensorClass::QuasiDoubleB;
    double lambda_min_estimate = 0.0;
    bool positive = false;
    OracleResult evidence;
};

/// Estimates the least H-eigenvalue of an even-order symmetric (quasi-)double
/// B-tensor and reports whether it is positive. Throws PreconditionError
/// when the tensor is outside those classes.
HEigenReport h_eigen_positivity_check(const Tensor& t, const OracleOptions& options = {});

}  // namespace btensor
