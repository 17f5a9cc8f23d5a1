#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace gapeq::cli {

using Json = nlohmann::ordered_json;

/// 12 significant digits, the precision of every artifact.
std::string num(double v);

/// v rounded to 12 significant digits so that JSON output matches the CSV text.
double rounded(double v);
Json json_array(const std::vector<double>& values);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    /// First line is `# config_digest=<digest>`, then the header; Unix line endings.
    std::string str(const std::string& digest) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table, const std::string& digest);
/// Adds "config_digest" as the first key.
void write_json(const std::filesystem::path& path, const Json& doc, const std::string& digest);

}  // namespace gapeq::cli
