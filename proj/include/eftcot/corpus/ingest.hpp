#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "eftcot/core/types.hpp"

namespace eftcot::corpus {

class ParseError : public IoError {
public:
    ParseError(std::size_t line, const std::string& detail);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    DuplicateIdError(std::string id, std::size_t line);
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// Reads JSONL {id, text, category[, source_meta]}. Blank lines are skipped.
/// Unknown categories raise UnknownCategoryError.
std::vector<HelpSeekingPost> ingest_corpus(std::istream& in);
std::vector<HelpSeekingPost> ingest_corpus(const std::filesystem::path& path);

} // namespace eftcot::corpus
