#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "eftcot/core/types.hpp"

namespace eftcot::pipeline {

struct AnchorThresholds {
    /// Fraction of metaphor key terms that must appear in the response.
    double empathy = 0.5;
    /// Minimum share of the new narrative's key terms found in the response.
    double logic = 0.15;
};

struct AnchorReport {
    bool context_ok = false;
    std::string matched_quote;
    bool empathy_ok = false;
    /// Matched key terms, space separated.
    std::string matched_metaphor;
    double empathy_coverage = 0.0;
    bool logic_ok = false;
    double logic_overlap = 0.0;
    bool passed = false;

    bool operator==(const AnchorReport&) const = default;

    /// Name of the first failing anchor ("context-anchor", ...) or empty.
    std::string first_failure() const;
};

/// Content terms of a metaphor or narrative: normalized words of length >= 2 outside the
/// stopword list; CJK runs contribute their character bigrams.
std::vector<std::string> metaphor_key_terms(std::string_view metaphor);

/// Fraction of `target`'s key terms (as in metaphor_key_terms) present in
/// `text`. A target without key terms counts as covered only when it occurs whole.
double content_coverage(std::string_view text, std::string_view target);

/// Context: a validation quote occurs in the response. Empathy: enough key
/// terms of the empathy metaphor (A7's selection, else A2's metaphor) occur.
/// Logic: the response carries enough of the A7 new narrative's key terms.
AnchorReport verify_anchors(const FinalResponse& response, const ReasoningTrace& trace,
                            const AnchorThresholds& thresholds = {});

} // namespace eftcot::pipeline
