#include "eftcot/pipeline/anchors.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "eftcot/core/unicode.hpp"

namespace eftcot::pipeline {

namespace {

const std::unordered_set<std::string>& english_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a", "an", "the", "of", "to", "in", "on", "at", "by", "for", "with", "from", "over", "under",
        "into", "onto", "during", "was", "were", "is", "are", "be", "been", "being", "it", "its",
        "my", "me", "i", "you", "your", "he", "she", "her", "his", "him", "they", "them", "their",
        "we", "our", "us", "and", "or", "but", "that", "this", "these", "those", "like", "as", "felt",
        "feel", "feels", "feeling", "had", "has", "have", "so", "just", "very", "then", "there",
        "what", "when", "while", "all", "some", "any", "not", "no", "do", "did", "does", "can",
        "could", "would", "should", "will", "if", "than", "too", "up", "out", "about", "again",
        "s", "t", "ve", "ll", "m", "re", "d", "instantly", "suddenly", "really",
    };
    return words;
}

bool is_cjk_stop(char32_t cp) {
    static const std::u32string stops = U"的了着过是在我你他她它们像一个把被就都也和与及而又很这那有吗呢吧啊得地";
    return stops.find(cp) != std::u32string::npos;
}

// Case/width folded code points with word boundaries kept.
std::u32string fold_keep_spaces(std::string_view s) {
    std::u32string out;
    for (char32_t cp : text::decode_utf8(s)) {
        if (text::is_space(cp)) {
            out.push_back(U' ');
            continue;
        }
        const std::u32string folded = text::normalize_codepoints(text::encode_utf8(std::u32string(1, cp)));
        out += folded;
    }
    return out;
}

struct Terms {
    std::vector<std::string> words;   // Latin/Greek/Cyrillic words
    std::vector<std::string> bigrams; // CJK bigrams
};

Terms split_terms(std::string_view s, bool drop_stopwords) {
    Terms t;
    std::set<std::string> seen;
    auto push = [&](std::vector<std::string>& dst, std::string term) {
        if (seen.insert(term).second) dst.push_back(std::move(term));
    };
    const std::u32string cps = fold_keep_spaces(s);
    std::size_t i = 0;
    while (i < cps.size()) {
        if (text::is_cjk(cps[i])) {
            std::u32string run;
            while (i < cps.size() && text::is_cjk(cps[i])) {
                if (drop_stopwords && is_cjk_stop(cps[i])) {
                    for (std::size_t k = 0; k + 1 < run.size(); ++k) push(t.bigrams, text::encode_utf8(run.substr(k, 2)));
                    run.clear();
                } else {
                    run.push_back(cps[i]);
                }
                ++i;
            }
            for (std::size_t k = 0; k + 1 < run.size(); ++k) push(t.bigrams, text::encode_utf8(run.substr(k, 2)));
        } else if (text::is_alnum(cps[i])) {
            std::u32string word;
            while (i < cps.size() && text::is_alnum(cps[i]) && !text::is_cjk(cps[i])) word.push_back(cps[i++]);
            std::string w = text::encode_utf8(word);
            if (word.size() >= 2 && !(drop_stopwords && english_stopwords().contains(w))) push(t.words, std::move(w));
        } else {
            ++i;
        }
    }
    return t;
}

std::vector<std::string> terms_found(const std::vector<std::string>& terms, std::string_view text) {
    const Terms in_text = split_terms(text, false);
    const std::u32string normalized = text::normalize_codepoints(text);
    std::vector<std::string> found;
    for (const auto& term : terms) {
        const std::u32string cps = text::decode_utf8(term);
        const bool hit = text::is_cjk(cps.front())
                             ? normalized.find(cps) != std::u32string::npos
                             : std::find(in_text.words.begin(), in_text.words.end(), term) != in_text.words.end();
        if (hit) found.push_back(term);
    }
    return found;
}

} // namespace

std::string AnchorReport::first_failure() const {
    if (!context_ok) return "context-anchor";
    if (!empathy_ok) return "empathy-anchor";
    if (!logic_ok) return "logic-anchor";
    return {};
}

std::vector<std::string> metaphor_key_terms(std::string_view metaphor) {
    Terms t = split_terms(metaphor, true);
    std::vector<std::string> out = std::move(t.words);
    out.insert(out.end(), t.bigrams.begin(), t.bigrams.end());
    return out;
}

double content_coverage(std::string_view text, std::string_view target) {
    const auto terms = metaphor_key_terms(target);
    if (terms.empty()) return text::contains_normalized(text, target) ? 1.0 : 0.0;
    return static_cast<double>(terms_found(terms, text).size()) / static_cast<double>(terms.size());
}

AnchorReport verify_anchors(const FinalResponse& response, const ReasoningTrace& trace,
                            const AnchorThresholds& thresholds) {
    AnchorReport r;
    if (trace.a7) {
        for (const auto& quote : trace.a7->validation_quotes) {
            if (text::contains_normalized(response.text, quote)) {
                r.context_ok = true;
                r.matched_quote = quote;
                break;
            }
        }
    }

    std::string metaphor;
    if (trace.a7 && !metaphor_key_terms(trace.a7->empathy_metaphor).empty()) metaphor = trace.a7->empathy_metaphor;
    else if (trace.a2) metaphor = trace.a2->embodied_metaphor;
    const auto terms = metaphor_key_terms(metaphor);
    if (!terms.empty()) {
        const auto hits = terms_found(terms, response.text);
        for (const auto& term : hits) r.matched_metaphor += (r.matched_metaphor.empty() ? "" : " ") + term;
        r.empathy_coverage = static_cast<double>(hits.size()) / static_cast<double>(terms.size());
        r.empathy_ok = !hits.empty() && r.empathy_coverage >= thresholds.empathy;
    }

    if (trace.a7 && !text::is_blank(trace.a7->new_narrative)) {
        r.logic_overlap = content_coverage(response.text, trace.a7->new_narrative);
        r.logic_ok = r.logic_overlap >= thresholds.logic;
    }
    r.passed = r.context_ok && r.empathy_ok && r.logic_ok;
    return r;
}

} // namespace eftcot::pipeline
