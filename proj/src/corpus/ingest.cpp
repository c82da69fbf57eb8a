#include "eftcot/corpus/ingest.hpp"

#include <fstream>
#include <span>
#include <set>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/unicode.hpp"

namespace eftcot::corpus {

ParseError::ParseError(std::size_t line, const std::string& detail)
    : IoError("line " + std::to_string(line) + ": " + detail), line_(line) {}

DuplicateIdError::DuplicateIdError(std::string id, std::size_t line)
    : Error("line " + std::to_string(line) + ": duplicate post id '" + id + "'"), id_(std::move(id)) {}

std::vector<HelpSeekingPost> ingest_corpus(std::istream& in) {
    std::vector<HelpSeekingPost> posts;
    std::set<std::string> ids;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::is_blank(line)) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(number, "not valid JSON");
        HelpSeekingPost post;
        try {
            post = post_from_json(j);
        } catch (const FormatError& e) {
            throw ParseError(number, e.what());
        }
        if (text::is_blank(post.id)) throw ParseError(number, "post id is empty");
        if (text::is_blank(post.text)) throw ParseError(number, "post text is empty");
        if (!ids.insert(post.id).second) throw DuplicateIdError(post.id, number);
        posts.push_back(std::move(post));
    }
    return posts;
}

std::vector<HelpSeekingPost> ingest_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus " + path.string());
    return ingest_corpus(in);
}

} // namespace eftcot::corpus
