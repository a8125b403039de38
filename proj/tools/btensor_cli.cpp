// Command-line front end: classify, certify, decompose, oracle, search-b0.
//
// Exit codes
//   classify   0 analysed, 2 I/O or usage error
//   certify    0 PositiveDefinite, 1 NotPositiveDefinite, 3 Inconclusive, 2 I/O
//   decompose  0 done, 4 input outside the requested class, 2 I/O
//   oracle     0 done, 2 I/O
//   search-b0  0 no candidates, 1 candidates found, 2 bad flags
// Internal invariant failures exit with 5.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "btensor/classify.hpp"
#include "btensor/decompose.hpp"
#include "btensor/error.hpp"
#include "btensor/io.hpp"
#include "btensor/oracle.hpp"

namespace {

using namespace btensor;

constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 4;
constexpr int kExitInternal = 5;

struct GlobalFlags {
    std::uint64_t seed = 0;
    double margin = 0.0;
    bool quiet = false;
};

std::string fmt_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

void emit(const ReportDocument& report, const GlobalFlags& global) {
    if (!global.quiet) {
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    }
    std::cout << dump(to_json(report));
}

Tensor read_input(const std::string& path, ReportDocument& report) {
    Tensor t = load_tensor(path, &report.warnings);
    report.input = digest(t);
    return t;
}

int run_classify(const std::string& path, bool b0_diagonal, const GlobalFlags& global) {
    ReportDocument report;
    report.command = "classify";
    report.flags = {{"file", path},
                    {"margin", fmt_double(global.margin)},
                    {"b0_diagonal", b0_diagonal ? "true" : "false"}};
    const Tensor t = read_input(path, report);
    report.classification = classify_all(t, {global.margin, b0_diagonal});
    emit(report, global);
    return 0;
}

int run_certify(const std::string& path, bool oracle, int starts, bool verbose,
                const GlobalFlags& global) {
    ReportDocument report;
    report.command = "certify";
    report.flags = {{"file", path},
                    {"margin", fmt_double(global.margin)},
                    {"oracle", oracle ? "true" : "false"},
                    {"starts", std::to_string(starts)},
                    {"seed", std::to_string(global.seed)},
                    {"verbose", verbose ? "true" : "false"}};
    const Tensor t = read_input(path, report);
    CertifyOptions options;
    options.margin = global.margin;
    options.use_oracle = oracle;
    options.oracle.seed = global.seed;
    options.oracle.starts = starts;
    options.verbose = verbose;
    report.certificate = pd_certify(t, options);
    emit(report, global);
    switch (report.certificate->verdict) {
        case PdVerdict::PositiveDefinite: return 0;
        case PdVerdict::NotPositiveDefinite: return 1;
        case PdVerdict::Inconclusive: return 3;
    }
    return 3;
}

int run_decompose(const std::string& path, const std::string& mode, bool no_verify,
                  const GlobalFlags& global) {
    ReportDocument report;
    report.command = "decompose";
    report.flags = {{"file", path}, {"mode", mode}, {"verify_steps", no_verify ? "false" : "true"}};
    const Tensor t = read_input(path, report);
    try {
        report.decomposition = decompose(t, {*mode_from_name(mode), !no_verify});
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrecondition;
    }
    emit(report, global);
    return 0;
}

int run_oracle(const std::string& path, int starts, int grid, const GlobalFlags& global) {
    ReportDocument report;
    report.command = "oracle";
    report.flags = {{"file", path},
                    {"starts", std::to_string(starts)},
                    {"grid", std::to_string(grid)},
                    {"seed", std::to_string(global.seed)}};
    const Tensor t = read_input(path, report);
    OracleOptions options;
    options.seed = global.seed;
    options.starts = starts;
    options.grid_points = grid;
    report.oracle = sphere_minimize(t, options);
    if (t.order() % 2 == 0) report.lambda_min = lambda_min_search(t, options);
    emit(report, global);
    return 0;
}

int run_search(const SearchOptions& options, const GlobalFlags& global) {
    ReportDocument report;
    report.command = "search-b0";
    report.flags = {{"order", std::to_string(options.order)},
                    {"dim", std::to_string(options.dim)},
                    {"trials", std::to_string(options.trials)},
                    {"seed", std::to_string(options.seed)},
                    {"tol", fmt_double(options.tolerance)},
                    {"starts", std::to_string(options.oracle.starts)}};
    report.search = conjecture_search(options);
    emit(report, global);
    return report.search->candidates.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classify real tensors into the B-tensor hierarchy and certify positive "
                 "definiteness"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags global;
    app.add_option("--seed", global.seed, "Seed for every randomized search");
    app.add_option("--margin", global.margin,
                   "Strict inequalities must hold by more than this amount")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", global.quiet, "Suppress warnings on stderr");

    std::string path;
    bool b0_diagonal = false;
    auto* classify = app.add_subcommand("classify", "Evaluate every class predicate");
    classify->add_option("file", path, "Tensor document")->required();
    classify->add_flag("--b0-diagonal", b0_diagonal,
                       "Require b_i..i >= beta_i in the quasi-double B0 test");

    bool oracle = false;
    bool verbose = false;
    int starts = 0;
    auto* certify = app.add_subcommand("certify", "Certify positive definiteness");
    certify->add_option("file", path, "Tensor document")->required();
    certify->add_flag("--oracle", oracle, "Fall back to the sphere search");
    certify->add_option("--starts", starts, "Random starts (0 = default)")->check(CLI::NonNegativeNumber);
    certify->add_flag("--verbose", verbose, "Record every applicable route");

    std::string mode = "quasi";
    bool no_verify = false;
    auto* decomp = app.add_subcommand("decompose", "Split into a Z-tensor plus all-one terms");
    decomp->add_option("file", path, "Tensor document")->required();
    decomp->add_option("--mode", mode, "Entry class")->check(CLI::IsMember({"quasi", "double"}));
    decomp->add_flag("--no-verify", no_verify, "Skip per-step class re-verification");

    int grid = 100000;
    auto* orc = app.add_subcommand("oracle", "Minimize the form over the unit sphere");
    orc->add_option("file", path, "Tensor document")->required();
    orc->add_option("--starts", starts, "Random starts (0 = default)")->check(CLI::NonNegativeNumber);
    orc->add_option("--grid", grid, "Angular grid points for dim 2")->check(CLI::NonNegativeNumber);

    SearchOptions search;
    auto* srch = app.add_subcommand("search-b0", "Search for non-PSD quasi-double B0 tensors");
    srch->add_option("--order", search.order, "Even order")->required();
    srch->add_option("--dim", search.dim, "Dimension")->required();
    srch->add_option("--trials", search.trials, "Accepted samples to test");
    srch->add_option("--tol", search.tolerance, "Candidate threshold: min value < -tol");
    srch->add_option("--starts", search.oracle.starts, "Random starts (0 = default)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*classify) return run_classify(path, b0_diagonal, global);
        if (*certify) return run_certify(path, oracle, starts, verbose, global);
        if (*decomp) return run_decompose(path, mode, no_verify, global);
        if (*orc) return run_oracle(path, starts, grid, global);
        if (*srch) {
            search.seed = global.seed;
            return run_search(search, global);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
