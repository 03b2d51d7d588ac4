#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qforge/common.hpp"

namespace qforge {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    return nlohmann::json::parse(read_text_file(path));
}

/// Shortest round-trip decimal form, reproducible across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Minimal deterministic CSV assembler.
class CsvWriter {
public:
    explicit CsvWriter(std::string header) { rows_.push_back(std::move(header)); }

    template <class... Ts>
    void row(const Ts&... fields) {
        std::string line;
        ((append_field(line, fields)), ...);
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string out;
        for (const auto& r : rows_) {
            out += r;
            out += '\n';
        }
        return out;
    }

    void save(const std::filesystem::path& path) const { write_text_file(path, str()); }

private:
    static void append_field(std::string& line, double v) {
        if (!line.empty()) line += ',';
        line += fmt_double(v);
    }
    static void append_field(std::string& line, int v) {
        if (!line.empty()) line += ',';
        line += std::to_string(v);
    }
    static void append_field(std::string& line, long v) {
        if (!line.empty()) line += ',';
        line += std::to_string(v);
    }
    static void append_field(std::string& line, std::size_t v) {
        if (!line.empty()) line += ',';
        line += std::to_string(v);
    }
    static void append_field(std::string& line, const std::string& v) {
        if (!line.empty()) line += ',';
        line += v;
    }
    static void append_field(std::string& line, const char* v) {
        if (!line.empty()) line += ',';
        line += v;
    }
    std::vector<std::string> rows_;
};

/// Run manifest: configuration echo plus a stable hash, no timestamps so
/// reruns are byte-identical.
inline nlohmann::json make_manifest(const nlohmann::json& config, const std::string& tool,
                                    const std::string& version) {
    const std::string canon = config.dump();
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return {{"tool", tool}, {"version", version}, {"config", config}, {"config_hash", hash}};
}

}  // namespace qforge
