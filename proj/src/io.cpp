#include "btensor/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "btensor/error.hpp"

namespace btensor {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw IoError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

int int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw IoError(std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

std::string_view status_name(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::Inapplicable: return "inapplicable";
    }
    return "?";
}

Status status_from_name(const std::string& s) {
    if (s == "holds") return Status::Holds;
    if (s == "fails") return Status::Fails;
    if (s == "inapplicable") return Status::Inapplicable;
    throw IoError("unknown verdict status \"" + s + "\"");
}

json subset_json(const IndexSubset& s) { return s.members(); }

json rows_json(const std::vector<RowStats>& rows) {
    json out = json::array();
    for (const auto& s : rows) {
        out.push_back({{"row", s.row},
                       {"diagonal", s.diagonal},
                       {"beta", s.beta},
                       {"delta", s.delta},
                       {"r", s.r},
                       {"row_sum", s.row_sum},
                       {"max_offdiagonal", s.max_offdiagonal}});
    }
    return out;
}

std::vector<RowStats> rows_from_json(const json& j) {
    std::vector<RowStats> rows;
    for (const auto& r : j) {
        RowStats s;
        s.row = r.at("row").get<int>();
        s.diagonal = r.at("diagonal").get<double>();
        s.beta = r.at("beta").get<double>();
        s.delta = r.at("delta").get<double>();
        s.r = r.at("r").get<double>();
        s.row_sum = r.at("row_sum").get<double>();
        s.max_offdiagonal = r.at("max_offdiagonal").get<double>();
        rows.push_back(s);
    }
    return rows;
}

}  // namespace

json tensor_to_json(const Tensor& t, const std::string& name) {
    json entries = json::array();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::bit_cast<std::uint64_t>(t[k]) == 0) continue;  // +0.0
        entries.push_back({{"idx", t.index_of(k).indices()}, {"val", t[k]}});
    }
    json doc = {{"order", t.order()}, {"dim", t.dim()}, {"entries", std::move(entries)}};
    if (!name.empty()) doc["name"] = name;
    return doc;
}

Tensor tensor_from_json(const json& doc) {
    const int order = int_field(doc, "order");
    const int dim = int_field(doc, "dim");
    const json& entries = field(doc, "entries");
    if (!entries.is_array()) throw IoError("field \"entries\" must be an array");
    std::vector<std::pair<MultiIndex, double>> list;
    list.reserve(entries.size());
    for (std::size_t pos = 0; pos < entries.size(); ++pos) {
        const json& e = entries[pos];
        const json& idx = field(e, "idx");
        const json& val = field(e, "val");
        if (!idx.is_array()) throw IoError("entry " + std::to_string(pos) + ": idx must be an array");
        std::vector<int> index;
        for (const auto& v : idx) {
            if (!v.is_number_integer()) {
                throw IoError("entry " + std::to_string(pos) + ": idx components must be integers");
            }
            index.push_back(v.get<int>());
        }
        if (!val.is_number()) throw IoError("entry " + std::to_string(pos) + ": val must be a number");
        const double value = val.get<double>();
        if (!std::isfinite(value)) {
            throw IoError("entry " + std::to_string(pos) + ": val is not finite");
        }
        list.emplace_back(MultiIndex(std::move(index)), value);
    }
    try {
        return make_tensor(order, dim, list);
    } catch (const InvalidArgument& e) {
        throw IoError(e.what());
    }
}

Tensor parse_tensor(std::string_view text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw IoError("parse error at " + line_column(text, e.byte) + ": " + e.what());
    } catch (const json::exception& e) {
        throw IoError(std::string("parse error: ") + e.what());
    }
    Tensor t = [&] {
        try {
            return tensor_from_json(doc);
        } catch (const json::exception& e) {
            throw IoError(e.what());
        }
    }();
    if (warnings) {
        if (auto v = symmetry_violation(t)) {
            warnings->push_back("tensor is not symmetric: entry " + v->first.to_string() +
                                " differs from " + v->second.to_string());
        }
    }
    return t;
}

Tensor load_tensor(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_tensor(buffer.str(), warnings);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void save_tensor(const std::filesystem::path& path, const Tensor& t, const std::string& name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << dump(tensor_to_json(t, name));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string content_hash(const Tensor& t) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t word) {
        for (int k = 0; k < 8; ++k) {
            h ^= (word >> (8 * k)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(static_cast<std::uint64_t>(t.order()));
    mix(static_cast<std::uint64_t>(t.dim()));
    for (double v : t.entries()) mix(std::bit_cast<std::uint64_t>(v));
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

InputDigest digest(const Tensor& t) {
    InputDigest d;
    d.order = t.order();
    d.dim = t.dim();
    for (double v : t.entries()) d.entry_count += std::bit_cast<std::uint64_t>(v) != 0;
    d.content_hash = content_hash(t);
    return d;
}

json to_json(const Verdict& v) {
    json out = {{"status", status_name(v.status)}, {"notes", v.notes}};
    if (v.witness) {
        const Witness& w = *v.witness;
        json wj = {{"condition", w.condition}, {"i", w.i}, {"lhs", w.lhs}, {"rhs", w.rhs}};
        if (w.j) wj["j"] = *w.j;
        if (w.index) wj["index"] = w.index->indices();
        wj["text"] = w.describe();
        out["witness"] = std::move(wj);
    }
    return out;
}

Verdict verdict_from_json(const json& j) {
    Verdict v;
    v.status = status_from_name(j.at("status").get<std::string>());
    v.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("witness")) {
        const json& wj = j.at("witness");
        Witness w;
        w.condition = wj.at("condition").get<std::string>();
        w.i = wj.at("i").get<int>();
        w.lhs = wj.at("lhs").get<double>();
        w.rhs = wj.at("rhs").get<double>();
        if (wj.contains("j")) w.j = wj.at("j").get<int>();
        if (wj.contains("index")) w.index = MultiIndex(wj.at("index").get<std::vector<int>>());
        v.witness = std::move(w);
    }
    return v;
}

json to_json(const ClassReport& r) {
    json verdicts = json::object();
    for (const auto& [c, v] : r.verdicts) verdicts[std::string(class_name(c))] = to_json(v);
    return {{"order", r.order},
            {"dim", r.dim},
            {"symmetric", r.symmetric},
            {"even_order", r.even_order},
            {"margin", r.margin},
            {"rows", rows_json(r.rows)},
            {"verdicts", std::move(verdicts)},
            {"chain_violations", r.chain_violations}};
}

ClassReport class_report_from_json(const json& j) {
    ClassReport r;
    r.order = j.at("order").get<int>();
    r.dim = j.at("dim").get<int>();
    r.symmetric = j.at("symmetric").get<bool>();
    r.even_order = j.at("even_order").get<bool>();
    r.margin = j.at("margin").get<double>();
    r.rows = rows_from_json(j.at("rows"));
    const json& verdicts = j.at("verdicts");
    for (TensorClass c : kAllClasses) {
        const std::string key(class_name(c));
        if (verdicts.contains(key)) r.verdicts.emplace_back(c, verdict_from_json(verdicts.at(key)));
    }
    r.chain_violations = j.at("chain_violations").get<std::vector<std::string>>();
    return r;
}

json to_json(const OracleResult& r) {
    json out = {{"min_value", r.min_value},
                {"minimizer", r.minimizer},
                {"normalization", normalization_name(r.normalization)},
                {"samples", r.samples},
                {"converged", r.converged}};
    if (r.lambda_min_estimate) out["lambda_min_estimate"] = *r.lambda_min_estimate;
    return out;
}

OracleResult oracle_result_from_json(const json& j) {
    OracleResult r;
    r.min_value = j.at("min_value").get<double>();
    r.minimizer = j.at("minimizer").get<std::vector<double>>();
    const auto norm = normalization_from_name(j.at("normalization").get<std::string>());
    if (!norm) throw IoError("unknown normalization");
    r.normalization = *norm;
    r.samples = j.at("samples").get<std::int64_t>();
    r.converged = j.at("converged").get<bool>();
    if (j.contains("lambda_min_estimate")) r.lambda_min_estimate = j.at("lambda_min_estimate").get<double>();
    return r;
}

json to_json(const Decomposition& d) {
    json steps = json::array();
    for (const auto& s : d.steps) {
        steps.push_back({{"h", s.h}, {"rows", subset_json(s.rows)}, {"exhausted", subset_json(s.exhausted)}});
    }
    return {{"mode", mode_name(d.mode)},
            {"s", d.s()},
            {"steps", std::move(steps)},
            {"residual", tensor_to_json(d.residual)}};
}

Decomposition decomposition_from_json(const json& j) {
    Decomposition d;
    const auto mode = mode_from_name(j.at("mode").get<std::string>());
    if (!mode) throw IoError("unknown decomposition mode");
    d.mode = *mode;
    d.residual = tensor_from_json(j.at("residual"));
    for (const auto& s : j.at("steps")) {
        d.steps.push_back({s.at("h").get<double>(),
                           IndexSubset(s.at("rows").get<std::vector<int>>(), d.residual.dim()),
                           IndexSubset(s.at("exhausted").get<std::vector<int>>(), d.residual.dim())});
    }
    return d;
}

json to_json(const Certificate& c) {
    json out = {{"verdict", verdict_name(c.verdict)},
                {"route", c.route},
                {"justification", c.justification},
                {"all_routes", c.all_routes},
                {"notes", c.notes}};
    if (c.decomposition) out["decomposition"] = to_json(*c.decomposition);
    if (c.oracle) out["oracle"] = to_json(*c.oracle);
    if (c.witness) out["witness"] = *c.witness;
    return out;
}

Certificate certificate_from_json(const json& j) {
    Certificate c;
    const auto verdict = verdict_from_name(j.at("verdict").get<std::string>());
    if (!verdict) throw IoError("unknown certificate verdict");
    c.verdict = *verdict;
    c.route = j.at("route").get<std::string>();
    c.justification = j.at("justification").get<std::vector<std::string>>();
    c.all_routes = j.at("all_routes").get<std::vector<std::string>>();
    c.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("decomposition")) c.decomposition = decomposition_from_json(j.at("decomposition"));
    if (j.contains("oracle")) c.oracle = oracle_result_from_json(j.at("oracle"));
    if (j.contains("witness")) c.witness = j.at("witness").get<std::vector<double>>();
    return c;
}

json to_json(const SearchReport& r) {
    json generator = json::object();
    for (const auto& [k, v] : r.generator_params) generator[k] = v;
    json candidates = json::array();
    for (const auto& c : r.candidates) {
        candidates.push_back({{"trial", c.trial},
                              {"trial_seed", c.trial_seed},
                              {"tensor", tensor_to_json(c.tensor)},
                              {"oracle", to_json(c.oracle)}});
    }
    return {{"order", r.order},
            {"dim", r.dim},
            {"trials", r.trials},
            {"attempts", r.attempts},
            {"tolerance", r.tolerance},
            {"seed", r.seed},
            {"generator", std::move(generator)},
            {"worst_min_value", r.worst_min_value},
            {"candidates", std::move(candidates)}};
}

SearchReport search_report_from_json(const json& j) {
    SearchReport r;
    r.order = j.at("order").get<int>();
    r.dim = j.at("dim").get<int>();
    r.trials = j.at("trials").get<std::int64_t>();
    r.attempts = j.at("attempts").get<std::int64_t>();
    r.tolerance = j.at("tolerance").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : j.at("generator").items()) r.generator_params.emplace_back(k, v.get<std::string>());
    r.worst_min_value = j.at("worst_min_value").get<double>();
    for (const auto& c : j.at("candidates")) {
        r.candidates.push_back({c.at("trial").get<std::int64_t>(), c.at("trial_seed").get<std::uint64_t>(),
                                tensor_from_json(c.at("tensor")), oracle_result_from_json(c.at("oracle"))});
    }
    return r;
}

json to_json(const ReportDocument& r) {
    json out = {{"tool", {{"name", kToolName}, {"version", r.tool_version}}},
                {"command", r.command},
                {"flags", r.flags},
                {"warnings", r.warnings}};
    if (r.input) {
        out["input"] = {{"order", r.input->order},
                        {"dim", r.input->dim},
                        {"entry_count", r.input->entry_count},
                        {"content_hash", r.input->content_hash}};
    }
    if (r.classification) out["classification"] = to_json(*r.classification);
    if (r.certificate) out["certificate"] = to_json(*r.certificate);
    if (r.oracle) out["oracle"] = to_json(*r.oracle);
    if (r.lambda_min) out["lambda_min"] = to_json(*r.lambda_min);
    if (r.decomposition) out["decomposition"] = to_json(*r.decomposition);
    if (r.search) out["search"] = to_json(*r.search);
    return out;
}

ReportDocument report_from_json(const json& j) {
    ReportDocument r;
    r.tool_version = j.at("tool").at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.flags = j.at("flags").get<std::map<std::string, std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("input")) {
        const json& in = j.at("input");
        r.input = InputDigest{in.at("order").get<int>(), in.at("dim").get<int>(),
                              in.at("entry_count").get<std::size_t>(),
                              in.at("content_hash").get<std::string>()};
    }
    if (j.contains("classification")) r.classification = class_report_from_json(j.at("classification"));
    if (j.contains("certificate")) r.certificate = certificate_from_json(j.at("certificate"));
    if (j.contains("oracle")) r.oracle = oracle_result_from_json(j.at("oracle"));
    if (j.contains("lambda_min")) r.lambda_min = oracle_result_from_json(j.at("lambda_min"));
    if (j.contains("decomposition")) r.decomposition = decomposition_from_json(j.at("decomposition"));
    if (j.contains("search")) r.search = search_report_from_json(j.at("search"));
    return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace btensor
