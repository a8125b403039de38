#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "btensor/classify.hpp"
#include "btensor/decompose.hpp"
#include "btensor/oracle.hpp"
#include "btensor/tensor.hpp"

namespace btensor {

inline constexpr std::string_view kToolName = "btensor";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// File could not be read, parsed or validated.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor document:
///
///     {"order": 4, "dim": 2, "name": "...",
///      "entries": [{"idx": [1, 1, 1, 1], "val": 2.0}, ...]}
///
/// Indices are 1-based; unlisted entries are zero.
nlohmann::json tensor_to_json(const Tensor& t, const std::string& name = "");
Tensor tensor_from_json(const nlohmann::json& doc);

/// Parses a tensor document. Syntax errors carry line and column.
/// Non-symmetric tensors are accepted; a warning is appended instead.
Tensor parse_tensor(std::string_view text, std::vector<std::string>* warnings = nullptr);
Tensor load_tensor(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
void save_tensor(const std::filesystem::path& path, const Tensor& t, const std::string& name = "");

/// FNV-1a over order, dim and the raw bits of every entry.
std::string content_hash(const Tensor& t);

struct InputDigest {
    int order = 0;
    int dim = 0;
    std::size_t entry_count = 0;  // entries that are not +0.0
    std::string content_hash;

    friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

InputDigest digest(const Tensor& t);

/// Machine-readable output of every CLI command.
struct ReportDocument {
    std::string tool_version{kToolVersion};
    std::string command;
    std::map<std::string, std::string> flags;
    std::optional<InputDigest> input;
    std::optional<ClassReport> classification;
    std::optional<Certificate> certificate;
    std::optional<OracleResult> oracle;
    std::optional<OracleResult> lambda_min;
    std::optional<Decomposition> decomposition;
    std::optional<SearchReport> search;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const ClassReport& r);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const OracleResult& r);
nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const SearchReport& r);
nlohmann::json to_json(const ReportDocument& r);

ClassReport class_report_from_json(const nlohmann::json& j);
Verdict verdict_from_json(const nlohmann::json& j);
OracleResult oracle_result_from_json(const nlohmann::json& j);
Decomposition decomposition_from_json(const nlohmann::json& j);
Certificate certificate_from_json(const nlohmann::json& j);
SearchReport search_report_from_json(const nlohmann::json& j);
ReportDocument report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace btensor
