#include "btensor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "btensor/classify.hpp"
#include "btensor/error.hpp"

namespace btensor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void normalize2(std::vector<double>& x) {
    const double len = norm2(x);
    for (double& v : x) v /= len;
}

// Evaluates A x^m and A x^{m-1} for a fixed tensor, reusing scratch space.
class FormEvaluator {
public:
    explicit FormEvaluator(const Tensor& t)
        : order_(t.order()), dim_(t.dim()), entries_(t.entries().begin(), t.entries().end()) {
        scratch_a_.resize(entries_.size() / dim_);
        scratch_b_.resize(scratch_a_.size());
    }

    int order() const { return order_; }
    int dim() const { return dim_; }

    double value(std::span<const double> x) {
        contract(x, order_ - 1);
        return dot(std::span<const double>(current_, dim_), x);
    }

    // Returns A x^m and fills grad with A x^{m-1}.
    double value_and_apply(std::span<const double> x, std::vector<double>& applied) {
        contract(x, order_ - 1);
        applied.assign(current_, current_ + dim_);
        return dot(applied, x);
    }

private:
    // Leaves the result of `times` trailing contractions in current_.
    void contract(std::span<const double> x, int times) {
        const double* src = entries_.data();
        std::size_t len = entries_.size();
        double* dst = scratch_a_.data();
        for (int k = 0; k < times; ++k) {
            const std::size_t out = len / dim_;
            for (std::size_t p = 0; p < out; ++p) {
                const double* block = src + p * dim_;
                double acc = 0.0;
                for (int q = 0; q < dim_; ++q) acc += block[q] * x[q];
                dst[p] = acc;
            }
            src = dst;
            len = out;
            dst = (dst == scratch_a_.data()) ? scratch_b_.data() : scratch_a_.data();
        }
        current_ = src;
    }

    int order_;
    int dim_;
    std::vector<double> entries_;
    std::vector<double> scratch_a_;
    std::vector<double> scratch_b_;
    const double* current_ = nullptr;
};

// Objective on the unit 2-sphere: either A x^m or the scale-free ratio
// A x^m / sum x_i^m.
class SphereObjective {
public:
    SphereObjective(const Tensor& symmetric, Normalization mode) : eval_(symmetric), mode_(mode) {}

    int dim() const { return eval_.dim(); }
    int order() const { return eval_.order(); }

    double value(std::span<const double> x) {
        const double f = eval_.value(x);
        return mode_ == Normalization::TwoNorm ? f : f / power_sum(x);
    }

    double value_and_gradient(std::span<const double> x, std::vector<double>& grad) {
        const double f = eval_.value_and_apply(x, grad);
        const double m = order();
        if (mode_ == Normalization::TwoNorm) {
            for (double& g : grad) g *= m;
            return f;
        }
        const double s = power_sum(x);
        for (std::size_t k = 0; k < grad.size(); ++k) {
            grad[k] = m * (grad[k] * s - f * std::pow(x[k], order() - 1)) / (s * s);
        }
        return f / s;
    }

private:
    double power_sum(std::span<const double> x) const {
        double acc = 0.0;
        for (double v : x) acc += std::pow(v, order());
        return acc;
    }

    FormEvaluator eval_;
    Normalization mode_;
};

struct Descent {
    double value = 0.0;
    std::vector<double> x;
    bool converged = false;
};

// Projected gradient descent on the unit 2-sphere with a backtracking
// search along the normalized tangent direction. Each search starts from
// twice the last accepted step, capped at 1. Ten accepted steps in a row
// that only move f at rounding level end the run.
Descent descend(SphereObjective& obj, std::vector<double> x, const OracleOptions& options) {
    normalize2(x);
    std::vector<double> grad;
    std::vector<double> trial(x.size());
    double f = obj.value_and_gradient(x, grad);
    bool converged = false;
    double last_step = 1.0;
    int stalled = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const double radial = dot(grad, x);
        for (std::size_t k = 0; k < x.size(); ++k) grad[k] -= radial * x[k];
        const double gnorm = norm2(grad);
        if (gnorm < options.gradient_tolerance) {
            converged = true;
            break;
        }
        double step = std::min(1.0, 2.0 * last_step);
        bool accepted = false;
        double f_trial = f;
        while (step > 1e-18) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] - step * grad[k] / gnorm;
            normalize2(trial);
            f_trial = obj.value(trial);
            if (f_trial <= f - 1e-4 * step * gnorm) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled at rounding level
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
        stalled = (f - f_trial <= noise) ? stalled + 1 : 0;
        last_step = step;
        x.swap(trial);
        f = obj.value_and_gradient(x, grad);
        if (stalled >= 10) {
            converged = gnorm < 1e-6 * std::max(1.0, std::abs(f));
            break;
        }
    }
    return {f, std::move(x), converged};
}

// Golden-section search for the minimum of the angular profile on [lo, hi].
std::pair<double, double> golden_section(SphereObjective& obj, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double theta) {
        const double x[2] = {std::cos(theta), std::sin(theta)};
        return obj.value(x);
    };
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double theta = fc < fd ? c : d;
    return {theta, std::min(fc, fd)};
}

bool better(const Descent& a, const Descent& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

// For even order x and -x are equivalent; pick the one whose first nonzero
// component is positive.
void canonical_sign(std::vector<double>& x, int order) {
    if (order % 2 != 0) return;
    for (double v : x) {
        if (v == 0.0) continue;
        if (v < 0.0) {
            for (double& w : x) w = -w;
        }
        return;
    }
}

Descent search(const Tensor& t, Normalization mode, const OracleOptions& options,
               std::int64_t& samples) {
    const Tensor sym = is_symmetric(t) ? t : symmetrize(t);
    SphereObjective obj(sym, mode);
    const int n = t.dim();
    const int starts = options.starts > 0 ? options.starts : (n == 2 ? 16 : 256);

    std::vector<std::vector<double>> initial;
    for (int i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> e(n, 0.0);
            e[i] = sign;
            initial.push_back(std::move(e));
        }
    }
    initial.emplace_back(n, 1.0);
    for (int s = 0; s < starts; ++s) {
        std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(s) + 1)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> x(n);
        do {
            for (double& v : x) v = normal(rng);
        } while (norm2(x) == 0.0);
        initial.push_back(std::move(x));
    }

    std::optional<Descent> best;
    auto consider = [&](Descent d) {
        if (!best || better(d, *best)) best = std::move(d);
    };
    for (auto& x0 : initial) consider(descend(obj, std::move(x0), options));
    samples = static_cast<std::int64_t>(initial.size());

    if (n == 2 && options.grid_points > 0) {
        const double period = 2.0 * std::numbers::pi;
        const double h = period / options.grid_points;
        int best_k = 0;
        double best_f = std::numeric_limits<double>::infinity();
        for (int k = 0; k < options.grid_points; ++k) {
            const double x[2] = {std::cos(k * h), std::sin(k * h)};
            const double f = obj.value(x);
            if (f < best_f) {
                best_f = f;
                best_k = k;
            }
        }
        samples += options.grid_points;
        auto [theta, f] = golden_section(obj, best_k * h - h, best_k * h + h);
        Descent grid{best_f, {std::cos(best_k * h), std::sin(best_k * h)}, true};
        if (f < best_f) grid = Descent{f, {std::cos(theta), std::sin(theta)}, true};
        consider(std::move(grid));
    }
    return *best;
}

}  // namespace

std::string_view normalization_name(Normalization n) {
    return n == Normalization::TwoNorm ? "l2" : "lm";
}

std::optional<Normalization> normalization_from_name(std::string_view name) {
    if (name == "l2") return Normalization::TwoNorm;
    if (name == "lm") return Normalization::OrderNorm;
    return std::nullopt;
}

OracleResult sphere_minimize(const Tensor& t, const OracleOptions& options) {
    OracleResult result;
    Descent best = search(t, Normalization::TwoNorm, options, result.samples);
    normalize2(best.x);
    canonical_sign(best.x, t.order());
    const Tensor sym = is_symmetric(t) ? t : symmetrize(t);
    result.min_value = form_value(sym, best.x);
    result.minimizer = std::move(best.x);
    result.normalization = Normalization::TwoNorm;
    result.converged = best.converged;
    return result;
}

OracleResult lambda_min_search(const Tensor& t, const OracleOptions& options) {
    if (t.order() % 2 != 0) {
        throw InvalidArgument("least H-eigenvalue estimate needs even order, got " +
                              std::to_string(t.order()));
    }
    OracleResult result;
    Descent best = search(t, Normalization::OrderNorm, options, result.samples);
    double power_sum = 0.0;
    for (double v : best.x) power_sum += std::pow(v, t.order());
    const double scale = std::pow(power_sum, 1.0 / t.order());
    for (double& v : best.x) v /= scale;
    canonical_sign(best.x, t.order());
    const Tensor sym = is_symmetric(t) ? t : symmetrize(t);
    result.min_value = form_value(sym, best.x);
    result.lambda_min_estimate = result.min_value;
    result.minimizer = std::move(best.x);
    result.normalization = Normalization::OrderNorm;
    result.converged = best.converged;
    return result;
}

double lambda_min_estimate(const Tensor& t, const OracleOptions& options) {
    return *lambda_min_search(t, options).lambda_min_estimate;
}

std::uint64_t trial_seed(std::uint64_t seed, std::int64_t attempt) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(attempt) * 0x632be59bd9b4e019ULL));
}

namespace {

constexpr int kEntryBits = 16;  // off-diagonal entries are multiples of 2^-16

double round_up_pow2(double v) { return std::exp2(std::ceil(std::log2(v))); }

}  // namespace

std::optional<Tensor> boundary_sample(int order, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Tensor shape(order, dim);
    std::uniform_int_distribution<int> level(-(1 << kEntryBits), 1 << kEntryBits);
    std::uniform_real_distribution<double> weight(0.5, 1.5);

    // One draw per index orbit, so the tensor is symmetric by construction
    // and every statistic below is an exact dyadic sum.
    std::vector<double> data(shape.size(), 0.0);
    {
        std::vector<int> idx(order);
        for (std::size_t offset = 0; offset < data.size(); ++offset) {
            std::size_t rest = offset;
            for (int k = order - 1; k >= 0; --k) {
                idx[k] = static_cast<int>(rest % dim);
                rest /= dim;
            }
            std::vector<int> key = idx;
            std::sort(key.begin(), key.end());
            if (key == idx) {
                const double v = std::ldexp(static_cast<double>(level(rng)), -kEntryBits);
                data[offset] = MultiIndex(idx).is_diagonal() ? 0.0 : v;
            }
        }
        std::vector<int> scratch(order);
        for (std::size_t offset = 0; offset < data.size(); ++offset) {
            std::size_t rest = offset;
            for (int k = order - 1; k >= 0; --k) {
                scratch[k] = static_cast<int>(rest % dim);
                rest /= dim;
            }
            std::sort(scratch.begin(), scratch.end());
            std::size_t canon = 0;
            for (int v : scratch) canon = canon * dim + v;
            data[offset] = data[canon];
        }
    }
    std::vector<double> w(dim);
    for (double& v : w) v = weight(rng);
    const int pivot = std::uniform_int_distribution<int>(0, dim - 1)(rng);

    const Tensor offdiag(order, dim, data);
    const auto rows = all_row_stats(offdiag);
    auto delta_ji = [&](int i, int j) { return pair_stats(offdiag, i + 1, j + 1).delta_j_i; };
    auto coupling = [&](int i, int j) {  // (beta_j - b_{j i...i}) * Delta_i
        return (rows[j].beta - offdiag.tail_entry(j, i)) * rows[i].delta;
    };

    // Smallest common scale t with u = t w satisfying every weak pair.
    double t_star = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            const double a = w[i] * w[j];
            const double b = w[i] * delta_ji(i, j);
            const double c = coupling(i, j);
            t_star = std::max(t_star, (b + std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a));
        }
    }
    if (!(t_star > 0.0)) return std::nullopt;

    // Powers of two keep u_i * (c / u_i) exact; the pivot row is then pulled
    // down onto the boundary of its tightest pair.
    std::vector<double> u(dim);
    for (int i = 0; i < dim; ++i) u[i] = round_up_pow2(t_star * w[i]);
    double pivot_u = 0.0;
    for (int i = 0; i < dim; ++i) {
        if (i == pivot) continue;
        pivot_u = std::max(pivot_u, delta_ji(i, pivot) + coupling(i, pivot) / u[i]);
        const double slack = u[i] - delta_ji(pivot, i);
        const double need = coupling(pivot, i);
        if (slack > 0.0) {
            pivot_u = std::max(pivot_u, need / slack);
        } else if (need > 0.0) {
            return std::nullopt;
        }
    }
    if (!(pivot_u > 0.0)) return std::nullopt;
    u[pivot] = pivot_u;

    ClassifyOptions weak;
    for (int nudge = 0; nudge < 8; ++nudge) {
        for (int i = 0; i < dim; ++i) data[i * shape.row_length() + shape.diagonal_offset_in_row(i)] = rows[i].beta + u[i];
        Tensor sample(order, dim, data);
        if (is_quasi_double_B0_tensor(sample, weak)) {
            if (is_quasi_double_B_tensor(sample, weak)) return std::nullopt;
            return sample;
        }
        u[pivot] = std::nextafter(u[pivot], std::numeric_limits<double>::infinity());
    }
    return std::nullopt;
}

SearchReport conjecture_search(const SearchOptions& options) {
    if (options.order < 2 || options.order % 2 != 0) {
        throw InvalidArgument("conjecture search needs an even order >= 2, got " +
                              std::to_string(options.order));
    }
    if (options.dim < 2) throw InvalidArgument("conjecture search needs dim >= 2");
    if (options.trials < 1) throw InvalidArgument("conjecture search needs trials >= 1");
    if (!(options.tolerance > 0.0)) throw InvalidArgument("conjecture search needs tolerance > 0");

    SearchReport report;
    report.order = options.order;
    report.dim = options.dim;
    report.tolerance = options.tolerance;
    report.seed = options.seed;
    report.generator_params = {
        {"offdiagonal", "uniform on multiples of 2^-16 in [-1,1], one draw per index orbit"},
        {"weights", "uniform [0.5,1.5]"},
        {"diagonal", "beta_i + u_i with u on the boundary of the weak pairwise condition"},
        {"filter", "QuasiDoubleB0 and not QuasiDoubleB"},
    };
    report.worst_min_value = std::numeric_limits<double>::infinity();

    const std::int64_t max_attempts = 200 * options.trials;
    std::int64_t accepted = 0;
    std::int64_t attempt = 0;
    for (; attempt < max_attempts && accepted < options.trials; ++attempt) {
        const std::uint64_t s = trial_seed(options.seed, attempt);
        auto sample = boundary_sample(options.order, options.dim, s);
        if (!sample) continue;
        OracleOptions oracle = options.oracle;
        oracle.seed = s;
        OracleResult found = sphere_minimize(*sample, oracle);
        report.worst_min_value = std::min(report.worst_min_value, found.min_value);
        if (found.min_value < -options.tolerance) {
            report.candidates.push_back({accepted, s, *sample, std::move(found)});
        }
        ++accepted;
    }
    report.trials = accepted;
    report.attempts = attempt;
    if (accepted == 0) report.worst_min_value = 0.0;
    return report;
}

}  // namespace btensor
