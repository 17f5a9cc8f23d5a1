#include "output.hpp"

#include <cstdio>
#include <fstream>

#include "gapeq/errors.hpp"

namespace gapeq::cli {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double rounded(double v) { return std::stod(num(v)); }

Json json_array(const std::vector<double>& values) {
    Json a = Json::array();
    for (double v : values) a.push_back(rounded(v));
    return a;
}

std::string CsvTable::str(const std::string& digest) const {
    std::string out = "# config_digest=" + digest + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, const std::string& digest) {
    write_text(path, table.str(digest));
}

void write_json(const std::filesystem::path& path, const Json& doc, const std::string& digest) {
    Json out;
    out["config_digest"] = digest;
    for (const auto& [k, v] : doc.items()) out[k] = v;
    write_text(path, out.dump(2) + "\n");
}

}  // namespace gapeq::cli
