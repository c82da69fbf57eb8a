#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "eftcot/core/json_io.hpp"

namespace eftcot::workbench {

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
    std::map<std::string, std::uint64_t> counts;
    std::vector<ordered_json> failures;
    std::map<std::string, std::uint64_t> seeds;
    ordered_json options = ordered_json::object();
    std::string started_at;
    std::string finished_at;
};

ordered_json to_json(const RunManifest& m);

/// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

/// Line writer that targets `<path>.partial` and renames onto `path` on commit.
class PartialWriter {
public:
    /// With `keep_existing`, complete lines already in `path` and a leftover
    /// `.partial` are carried over; a truncated trailing line is dropped.
    explicit PartialWriter(std::filesystem::path path, bool keep_existing = false);
    ~PartialWriter();
    PartialWriter(const PartialWriter&) = delete;
    PartialWriter& operator=(const PartialWriter&) = delete;

    void write_line(const std::string& line);
    void write(const std::string& content);
    void commit();

    /// Complete lines carried over from a previous run.
    const std::vector<std::string>& carried_lines() const { return carried_; }

private:
    std::filesystem::path path_;
    std::filesystem::path partial_;
    std::ofstream out_;
    std::vector<std::string> carried_;
    bool committed_ = false;
};

/// Writes `content` through a `.partial` file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::filesystem::path partial_path(const std::filesystem::path& path);

} // namespace eftcot::workbench
