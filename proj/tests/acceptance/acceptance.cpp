// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   btensor_acceptance            run all eight
//   btensor_acceptance 3 5        run a selection

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "btensor/classify.hpp"
#include "btensor/decompose.hpp"
#include "btensor/io.hpp"
#include "btensor/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace btensor;
using namespace btensor::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { details.push_back("     " + what); }
};

std::string num(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Shell {
    int exit_code = -1;
    std::string out;
};

Shell shell(const std::string& args) {
    Shell r;
    const std::string cmd = std::string(BTENSOR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buffer[8192];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// ---------------------------------------------------------------- suites

constexpr std::uint64_t kSuiteSeed = 20240601;

// Uniform entries in [-2, 2] over m, n in {2, 3, 4}; the second half gets
// its diagonal raised towards the row's absolute sum so the classes are
// populated rather than vacuous.
std::vector<Tensor> uniform_suite(int count) {
    std::mt19937_64 rng(kSuiteSeed);
    std::uniform_real_distribution<double> factor(0.3, 1.6);
    std::vector<Tensor> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const int m = 2 + k % 3, n = 2 + (k / 3) % 3;
        Tensor t = random_tensor(rng, m, n, -2.0, 2.0);
        if (k >= count / 2) {
            std::vector<double> diagonal(n);
            for (int i = 0; i < n; ++i) {
                double r = 0.0;
                for (double v : t.row(i)) r += std::abs(v);
                diagonal[i] = r * factor(rng);
            }
            t = with_diagonal(t, diagonal);
        }
        out.push_back(std::move(t));
    }
    return out;
}

// Z-tensors: uniform [-2, 2] draws with the off-diagonal part folded onto
// the non-positive half-line. Diagonals keep their sign; every second one
// is raised towards the row's absolute sum.
std::vector<Tensor> z_suite(int count) {
    std::mt19937_64 rng(kSuiteSeed + 1);
    std::uniform_real_distribution<double> factor(0.3, 1.6);
    std::vector<Tensor> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const int m = 2 + k % 3, n = 2 + (k / 3) % 3;
        const Tensor raw = random_tensor(rng, m, n, -2.0, 2.0);
        std::vector<double> data(raw.entries().begin(), raw.entries().end());
        for (std::size_t q = 0; q < data.size(); ++q) {
            if (!raw.index_of(q).is_diagonal()) data[q] = -std::abs(data[q]);
        }
        Tensor t(m, n, data);
        if (k % 2 == 1) {
            std::vector<double> diagonal(n);
            for (int i = 0; i < n; ++i) diagonal[i] = row_stats(t, i + 1).r * factor(rng);
            t = with_diagonal(t, diagonal);
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct QuasiInstance {
    Tensor tensor;
    int order;
    int dim;
};

// Symmetric even-order quasi-double B tensors: Q-DSDD symmetric Z-tensor
// plus random h * ones(J) terms, kept only when the classifier agrees.
std::vector<QuasiInstance> quasi_suite(int count) {
    static const std::pair<int, int> shapes[] = {{4, 2}, {4, 3}, {2, 2}, {2, 3}, {4, 4}, {2, 4}};
    std::mt19937_64 rng(kSuiteSeed + 2);
    std::vector<QuasiInstance> out;
    out.reserve(count);
    for (std::int64_t attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
        const auto [m, n] = shapes[out.size() % 6];
        if (auto t = quasi_double_b_instance(rng, m, n)) out.push_back({std::move(*t), m, n});
    }
    return out;
}

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
    Outcome o;
    const Tensor t = remark_order3();
    const auto start = Clock::now();
    const ClassReport r = classify_all(t);
    const double elapsed = seconds_since(start);
    const auto& s1 = r.rows[0];
    const auto& s2 = r.rows[1];
    o.check(s1.beta == 0.0 && s2.beta == 0.0, "beta_1 = beta_2 = 0");
    o.check(std::abs(s2.delta - 2.8) <= 1e-12, "Delta_2 = " + num(s2.delta) + " (expected 2.8)");
    o.check(!r.holds(TensorClass::DoubleB), "DoubleB = false");
    const PairStats p12 = pair_stats(t, 1, 2);
    const double lhs12 = (s1.diagonal - s1.beta) * (s2.diagonal - s2.beta - p12.delta_j_i);
    const double rhs12 = (s2.beta - p12.tail) * s1.delta;
    o.check(std::abs(lhs12 - 0.4) <= 1e-12 && std::abs(rhs12 - 0.3) <= 1e-12 && lhs12 > rhs12,
            "pair (1,2): " + num(lhs12) + " > " + num(rhs12) + " (expected 0.4 > 0.3)");
    const PairStats p21 = pair_stats(t, 2, 1);
    const double lhs21 = (s2.diagonal - s2.beta) * (s1.diagonal - s1.beta - p21.delta_j_i);
    const double rhs21 = (s1.beta - p21.tail) * s2.delta;
    o.check(std::abs(lhs21 - 4.0) <= 1e-12 && std::abs(rhs21 - 0.84) <= 1e-12 && lhs21 > rhs21,
            "pair (2,1): " + num(lhs21) + " > " + num(rhs21) + " (expected 4 > 0.84)");
    o.check(r.holds(TensorClass::QuasiDoubleB), "QuasiDoubleB = true");
    o.check(elapsed < 1e-3, "classification took " + num(elapsed * 1e3) + " ms (limit 1 ms)");
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto start = Clock::now();
    const Tensor t = counterexample_order4();
    const ClassReport r = classify_all(t);
    const double lhs = (r.rows[0].diagonal - r.rows[0].beta) * (r.rows[1].diagonal - r.rows[1].beta);
    const double rhs = r.rows[0].delta * r.rows[1].delta;
    o.check(r.holds(TensorClass::ProductIneq) && lhs == 4.0 && rhs == 3.0,
            "ProductIneq holds with " + num(lhs) + " > " + num(rhs));
    o.check(!r.holds(TensorClass::QuasiDoubleB), "QuasiDoubleB = false");
    o.check(!r.holds(TensorClass::DoubleB), "DoubleB = false");
    const OracleResult found = sphere_minimize(t);
    o.check(found.min_value <= -0.76, "oracle min_value " + num(found.min_value) + " <= -0.76");
    o.info("form at (1, 1.2) unnormalized: " + num(form_value(t, std::vector<double>{1.0, 1.2})));
    o.info("form at (1, 1.2)/|(1, 1.2)|_2: " +
           num(form_value(t, std::vector<double>{1.0 / std::sqrt(2.44), 1.2 / std::sqrt(2.44)})));
    o.check(found.min_value < 0.0, "oracle min_value < 0 (not positive definite)");
    const double library_time = seconds_since(start);
    const Shell cli = shell("certify --oracle " + data_path("counterexample_order4.json"));
    o.check(cli.exit_code == 1, "cli certify --oracle exit code " + std::to_string(cli.exit_code));
    const double total = seconds_since(start);
    o.check(library_time < 1.0, "classify + oracle took " + num(library_time) + " s (limit 1 s)");
    o.info("including the CLI process: " + num(total) + " s");
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto start = Clock::now();
    const std::vector<Tensor> suite = uniform_suite(10000);
    long chain = 0, at_most_one_double = 0, at_most_one_quasi = 0;
    long b = 0, dbl = 0, quasi = 0, b0 = 0;
    for (const Tensor& t : suite) {
        const bool is_b = is_B_tensor(t).holds();
        const bool is_d = is_double_B_tensor(t).holds();
        const bool is_q = is_quasi_double_B_tensor(t).holds();
        const bool is_q0 = is_quasi_double_B0_tensor(t).holds();
        b += is_b;
        dbl += is_d;
        quasi += is_q;
        b0 += is_q0;
        chain += (is_b && !is_d) + (is_d && !is_q) + (is_q && !is_q0);
        int equal_rows = 0, weak_rows = 0;
        for (const RowStats& s : all_row_stats(t)) {
            equal_rows += s.diagonal - s.beta == s.delta;
            weak_rows += s.diagonal - s.beta <= s.delta;
        }
        at_most_one_double += is_d && equal_rows > 1;
        at_most_one_quasi += is_q && weak_rows > 1;
    }
    o.info("uniform suite: 10000 tensors, B " + std::to_string(b) + ", double B " + std::to_string(dbl) +
           ", quasi-double B " + std::to_string(quasi) + ", quasi-double B0 " + std::to_string(b0));
    o.check(chain == 0, "B => DoubleB => QuasiDoubleB => QuasiDoubleB0 violations: " + std::to_string(chain));
    o.check(at_most_one_double == 0,
            "double B with two rows at b - beta = Delta: " + std::to_string(at_most_one_double));
    o.check(at_most_one_quasi == 0,
            "quasi-double B with two rows at b - beta <= Delta: " + std::to_string(at_most_one_quasi));

    // Z-tensor equivalences, checked as stated and broken down by cause.
    const std::vector<Tensor> zs = z_suite(10000);
    long double_bad = 0, quasi_bad = 0;
    long double_bad_negative = 0, quasi_bad_negative = 0, double_bad_matrix = 0;
    long double_bad_other = 0, quasi_bad_other = 0;
    std::string first_double, first_quasi;
    for (const Tensor& t : zs) {
        bool negative_diagonal = false;
        for (int i = 0; i < t.dim(); ++i) negative_diagonal = negative_diagonal || t.diagonal(i) < 0.0;
        if (is_double_B_tensor(t).holds() != is_DSDD(t).holds()) {
            ++double_bad;
            if (negative_diagonal) {
                ++double_bad_negative;
            } else if (t.order() == 2) {
                ++double_bad_matrix;
            } else {
                ++double_bad_other;
            }
            if (first_double.empty() && !negative_diagonal) first_double = dump(tensor_to_json(t));
        }
        if (is_quasi_double_B_tensor(t).holds() != is_QDSDD(t).holds()) {
            ++quasi_bad;
            (negative_diagonal ? quasi_bad_negative : quasi_bad_other) += 1;
            if (first_quasi.empty()) first_quasi = dump(tensor_to_json(t));
        }
    }
    o.check(double_bad == 0, "Z-tensors with DoubleB != DSDD: " + std::to_string(double_bad) + " of 10000");
    o.info("  with a negative diagonal entry: " + std::to_string(double_bad_negative));
    o.info("  order 2, nonnegative diagonal: " + std::to_string(double_bad_matrix));
    o.info("  order > 2, nonnegative diagonal: " + std::to_string(double_bad_other));
    o.check(quasi_bad == 0, "Z-tensors with QuasiDoubleB != QDSDD: " + std::to_string(quasi_bad) + " of 10000");
    o.info("  with a negative diagonal entry: " + std::to_string(quasi_bad_negative));
    o.info("  nonnegative diagonal: " + std::to_string(quasi_bad_other));
    o.check(double_bad_other == 0 && quasi_bad_other == 0,
            "equivalences on Z-tensors with nonnegative diagonal (order > 2 for DSDD)");
    const double elapsed = seconds_since(start);
    o.check(elapsed < 30.0, "runtime " + num(elapsed) + " s (limit 30 s)");
    return o;
}

struct BetaReplay {
    long violations = 0;
    double worst = 0.0;
};

// Replays the subtraction loop on the input and checks the beta shift of
// every row after each step: exhausted rows drop to 0, the rest of the
// active set drop by h and stay positive, inactive rows keep beta.
void replay_beta_shift(const Tensor& input, const Decomposition& d, BetaReplay& out) {
    Tensor current = input;
    for (const DecompositionStep& step : d.steps) {
        const Tensor next = linear_combine(current, partially_all_one(input.order(), input.dim(), step.rows), -step.h);
        for (int i = 1; i <= input.dim(); ++i) {
            const double before = row_stats(current, i).beta;
            const double after = row_stats(next, i).beta;
            const double expected = step.rows.contains(i) ? before - step.h : before;
            const double err = std::abs(after - expected);
            out.worst = std::max(out.worst, err);
            bool ok = err <= 1e-12;
            if (step.exhausted.contains(i)) ok = ok && std::abs(after) <= 1e-12;
            if (step.rows.contains(i) && !step.exhausted.contains(i)) ok = ok && after > 0.0;
            out.violations += !ok;
        }
        current = next;
    }
}

const std::vector<QuasiInstance>& shared_quasi_suite() {
    static const std::vector<QuasiInstance> suite = quasi_suite(1200);
    return suite;
}

Outcome criterion4() {
    Outcome o;
    const auto start = Clock::now();
    const auto& suite = shared_quasi_suite();
    long ok = 0, failures = 0, recon_bad = 0, residual_bad = 0, s_bad = 0;
    double worst_recon = 0.0;
    std::map<std::size_t, long> s_hist;
    BetaReplay beta;
    for (const auto& q : suite) {
        Decomposition d;
        try {
            d = decompose(q.tensor);
        } catch (const std::exception& e) {
            ++failures;
            continue;
        }
        ++ok;
        ++s_hist[d.s()];
        const Tensor back = reconstruct(d);
        for (std::size_t k = 0; k < back.size(); ++k) {
            const double err = std::abs(back[k] - q.tensor[k]);
            worst_recon = std::max(worst_recon, err);
            if (err > 1e-12) {
                ++recon_bad;
                break;
            }
        }
        residual_bad += !(is_Z_tensor(d.residual).holds() && is_QDSDD(d.residual).holds() &&
                          is_symmetric(d.residual));
        s_bad += d.s() > static_cast<std::size_t>(q.dim);
        replay_beta_shift(q.tensor, d, beta);
    }
    std::string hist;
    for (const auto& [s, c] : s_hist) hist += " s=" + std::to_string(s) + ":" + std::to_string(c);
    o.info("suite of " + std::to_string(suite.size()) + " instances, orders {2,4}, dims {2,3,4};" + hist);
    o.check(suite.size() >= 1000, "suite size " + std::to_string(suite.size()) + " >= 1000");
    o.check(failures == 0, "decompose succeeded on " + std::to_string(ok) + "/" + std::to_string(suite.size()));
    o.check(recon_bad == 0, "reconstruction within 1e-12 per entry (worst " + num(worst_recon) + ")");
    o.check(residual_bad == 0, "residual symmetric Z and Q-DSDD (failures " + std::to_string(residual_bad) + ")");
    o.check(s_bad == 0, "s <= n (failures " + std::to_string(s_bad) + ")");
    o.check(beta.violations == 0, "beta shift identities within 1e-12 (violations " +
                                      std::to_string(beta.violations) + ", worst " + num(beta.worst) + ")");
    const double elapsed = seconds_since(start);
    o.check(elapsed < 60.0, "runtime " + num(elapsed) + " s (limit 60 s)");
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto start = Clock::now();
    long tested = 0, bad = 0;
    double smallest = INFINITY;
    for (const auto& q : shared_quasi_suite()) {
        if (q.order != 4 || q.dim > 3) continue;
        ++tested;
        const double lam = lambda_min_estimate(q.tensor);
        smallest = std::min(smallest, lam);
        bad += !(lam > 1e-9);
    }
    o.check(tested > 0, "instances with order 4, dim 2 or 3: " + std::to_string(tested));
    o.check(bad == 0, "lambda_min estimate > 1e-9 on all (failures " + std::to_string(bad) +
                          ", smallest " + num(smallest) + ")");
    const double elapsed = seconds_since(start);
    o.check(elapsed < 300.0, "runtime " + num(elapsed) + " s (limit 300 s)");
    return o;
}

Outcome criterion6() {
    Outcome o;
    const auto start = Clock::now();
    std::vector<Tensor> pool;
    for (const auto& q : shared_quasi_suite()) pool.push_back(q.tensor);
    for (const Tensor& t : uniform_suite(10000)) {
        if (t.order() % 2 == 0) pool.push_back(symmetrize(t));
    }
    for (const Tensor& t : z_suite(10000)) {
        if (t.order() % 2 == 0) pool.push_back(symmetrize(t));
    }
    long certified = 0, contradictions = 0;
    std::map<std::string, long> routes;
    double worst = INFINITY;
    for (const Tensor& t : pool) {
        const Certificate c = pd_certify(t);
        if (c.verdict != PdVerdict::PositiveDefinite) continue;
        ++certified;
        ++routes[c.route];
        const OracleResult r = sphere_minimize(t);
        worst = std::min(worst, r.min_value);
        contradictions += r.min_value < -1e-9;
    }
    std::string summary;
    for (const auto& [route, c] : routes) summary += " " + route + ":" + std::to_string(c);
    o.info("pool " + std::to_string(pool.size()) + " symmetric even-order tensors, certified " +
           std::to_string(certified) + ";" + summary);
    o.check(certified > 0, "certificates issued: " + std::to_string(certified));
    o.check(contradictions == 0, "certified tensors with oracle minimum below -1e-9: " +
                                     std::to_string(contradictions) + " (least minimum " + num(worst) + ")");
    o.info("runtime " + num(seconds_since(start)) + " s");
    return o;
}

Outcome criterion7() {
    Outcome o;
    const std::string args = "--seed 42 search-b0 --order 4 --dim 2 --trials 1000";
    auto start = Clock::now();
    const Shell first = shell(args);
    const double elapsed = seconds_since(start);
    const Shell second = shell(args);
    o.check(first.exit_code == 0 || first.exit_code == 1, "exit code " + std::to_string(first.exit_code));
    o.check(elapsed < 300.0, "runtime " + num(elapsed) + " s (limit 300 s)");
    o.check(!first.out.empty() && first.out == second.out, "second run is byte-identical");
    ReportDocument doc;
    try {
        doc = report_from_json(nlohmann::json::parse(first.out));
    } catch (const std::exception& e) {
        o.check(false, std::string("report parses: ") + e.what());
        return o;
    }
    o.check(doc.search.has_value() && doc.search->trials == 1000, "report covers 1000 accepted samples");
    if (!doc.search) return o;
    o.info("attempts " + std::to_string(doc.search->attempts) + ", least sphere minimum " +
           num(doc.search->worst_min_value) + ", candidates " + std::to_string(doc.search->candidates.size()));
    o.check((first.exit_code == 1) == !doc.search->candidates.empty(), "exit code matches candidate list");
    long reverified = 0;
    for (const SearchCandidate& c : doc.search->candidates) {
        const bool b0 = is_quasi_double_B0_tensor(c.tensor).holds();
        const double value = form_value(c.tensor, c.oracle.minimizer);
        const auto regenerated = boundary_sample(4, 2, c.trial_seed);
        const bool same_value = std::bit_cast<std::uint64_t>(value) ==
                                std::bit_cast<std::uint64_t>(c.oracle.min_value);
        const bool ok = b0 && same_value && value < -doc.search->tolerance && regenerated &&
                        *regenerated == c.tensor;
        reverified += ok;
        o.info("candidate trial " + std::to_string(c.trial) + ": form " + num(value) +
               (ok ? " re-verified" : " did not re-verify"));
    }
    o.check(reverified == static_cast<long>(doc.search->candidates.size()),
            "candidates re-verified from serialized data: " + std::to_string(reverified) + "/" +
                std::to_string(doc.search->candidates.size()));
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto start = Clock::now();
    const std::vector<Tensor> suite = uniform_suite(10000);
    long disagreements = 0, positives = 0;
    for (const Tensor& t : suite) {
        const BTensorForms f = b_tensor_forms(t);
        disagreements += !(f.definition == f.row_sum_bound && f.definition == f.dominance);
        positives += f.definition;
    }
    o.info("10000 tensors, " + std::to_string(positives) + " B-tensors");
    o.check(disagreements == 0, "disagreements between the three formulations: " + std::to_string(disagreements));
    o.info("runtime " + num(seconds_since(start)) + " s");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8};
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k) selected.push_back(std::stoi(argv[k]));
    if (selected.empty()) {
        for (int k = 1; k <= 8; ++k) selected.push_back(k);
    }
    bool all = true;
    for (int k : selected) {
        if (k < 1 || k > 8) {
            std::cerr << "no criterion " << k << '\n';
            return 2;
        }
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[k - 1]();
        } catch (const std::exception& e) {
            o.check(false, std::string("threw: ") + e.what());
        }
        const double elapsed = seconds_since(start);
        std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  (" << num(elapsed) << " s)\n";
        for (const auto& line : o.details) std::cout << "    " << line << '\n';
        std::cout.flush();
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
