#include "eftcot/workbench/manifest.hpp"

#include <chrono>
#include <ctime>
#include <set>
#include <sstream>

namespace eftcot::workbench {

namespace fs = std::filesystem;

ordered_json to_json(const RunManifest& m) {
    ordered_json j;
    j["command"] = m.command;
    j["config_path"] = m.config_path;
    j["config_hash"] = m.config_hash;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["counts"] = m.counts;
    j["failures"] = m.failures;
    j["seeds"] = m.seeds;
    j["options"] = m.options;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path partial_path(const fs::path& path) { return fs::path(path.string() + ".partial"); }

namespace {

void collect_complete_lines(const fs::path& p, std::vector<std::string>& out) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    std::size_t start = 0;
    for (std::size_t nl; (nl = content.find('\n', start)) != std::string::npos; start = nl + 1) {
        std::string line = content.substr(start, nl - start);
        if (!line.empty()) out.push_back(std::move(line));
    }
}

} // namespace

PartialWriter::PartialWriter(fs::path path, bool keep_existing) : path_(std::move(path)), partial_(partial_path(path_)) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    if (keep_existing) {
        collect_complete_lines(path_, carried_);
        collect_complete_lines(partial_, carried_);
        std::set<std::string> seen;
        std::erase_if(carried_, [&](const std::string& line) { return !seen.insert(line).second; });
    }
    out_.open(partial_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + partial_.string());
    for (const auto& line : carried_) out_ << line << '\n';
    out_.flush();
}

PartialWriter::~PartialWriter() {
    if (out_.is_open()) out_.close();
}

void PartialWriter::write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed on " + partial_.string());
}

void PartialWriter::write(const std::string& content) {
    out_ << content;
    if (!out_) throw IoError("write failed on " + partial_.string());
}

void PartialWriter::commit() {
    if (committed_) return;
    out_.close();
    if (!out_) throw IoError("write failed on " + partial_.string());
    std::error_code ec;
    fs::rename(partial_, path_, ec);
    if (ec) throw IoError("cannot rename " + partial_.string() + ": " + ec.message());
    committed_ = true;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    PartialWriter w(path);
    w.write(content);
    w.commit();
}

} // namespace eftcot::workbench
