#pragma once

// Run artifacts: CSV writers, JSON summaries, content checksums and the run
// manifest that lists every emitted file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "eirnet/errors.hpp"
#include "eirnet/io/params_io.hpp"
#include "eirnet/validation.hpp"

namespace eirnet::io {

inline constexpr const char* manifest_schema = "ei-run/1";
inline constexpr const char* csv_schema = "ei-csv/1";
inline constexpr const char* tool_version = "0.1.0";

inline std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

/// Hash of the canonical (key-sorted, shortest round-trip) params document.
inline std::string params_hash(const ModelParams& p) { return sha256_hex(params_to_json(p).dump()); }

/// Shortest representation that reads back to the same double.
inline std::string fmt(double v)
{
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

/// Buffered CSV table; one writer per file.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns))
    {
        for (std::size_t k = 0; k < columns_.size(); ++k)
            os_ << (k ? "," : "") << columns_[k];
        os_ << '\n';
    }

    CsvTable& cell(double v) { return raw(fmt(v)); }
    CsvTable& cell(std::size_t v) { return raw(std::to_string(v)); }
    CsvTable& cell(int v) { return raw(std::to_string(v)); }
    CsvTable& cell(const std::string& v) { return raw(v); }

    void end_row()
    {
        if (col_ != columns_.size())
            throw Error("CSV row has " + std::to_string(col_) + " cells, expected " +
                        std::to_string(columns_.size()));
        os_ << '\n';
        col_ = 0;
        ++rows_;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::string str() const { return os_.str(); }

private:
    CsvTable& raw(const std::string& s)
    {
        os_ << (col_ ? "," : "") << s;
        ++col_;
        return *this;
    }

    std::vector<std::string> columns_;
    std::ostringstream os_;
    std::size_t col_ = 0;
    std::size_t rows_ = 0;
};

/// Collects the files of one run; removes them again unless committed.
class RunArtifacts {
public:
    explicit RunArtifacts(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::filesystem::create_directories(dir_);
    }
    RunArtifacts(const RunArtifacts&) = delete;
    RunArtifacts& operator=(const RunArtifacts&) = delete;

    ~RunArtifacts()
    {
        if (committed_)
            return;
        std::error_code ec;
        for (const auto& f : files_)
            std::filesystem::remove(dir_ / f.at("name").get<std::string>(), ec);
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void write(const std::string& name, const std::string& content)
    {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write '" + path.string() + "'");
        out << content;
        out.close();
        if (!out)
            throw Error("write to '" + path.string() + "' failed");
        files_.push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }

    void write(const std::string& name, const CsvTable& table) { write(name, table.str()); }
    void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    /// Write manifest.json (itself not listed) and keep all files.
    json commit(json manifest)
    {
        manifest["schema"] = manifest_schema;
        manifest["csv_schema"] = csv_schema;
        manifest["version"] = tool_version;
        manifest["files"] = files_;
        const auto path = dir_ / "manifest.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << manifest.dump(2) << "\n";
        if (!out)
            throw Error("cannot write manifest '" + path.string() + "'");
        committed_ = true;
        return manifest;
    }

private:
    std::filesystem::path dir_;
    json files_ = json::array();
    bool committed_ = false;
};

inline json report_to_json(const ValidationReport& r)
{
    json j;
    j["all_passed"] = r.all_passed();
    j["warnings"] = r.warnings;
    j["d_computed"] = r.d_computed;
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        json e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["margin"] = c.margin;
        if (!c.reason.empty())
            e["reason"] = c.reason;
        e["details"] = c.details;
        j["checks"].push_back(e);
    }
    return j;
}

} // namespace eirnet::io
