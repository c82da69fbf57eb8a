#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eftcot/gateway/gateway.hpp"
#include "eftcot/gateway/routing.hpp"
#include "eftcot/judge/scoring.hpp"

namespace eftcot::judge {

struct JudgeCase {
    std::string case_id;
    std::string post;
    /// System id to response text.
    std::map<std::string, std::string> responses;
};

struct JudgeConfig {
    std::vector<std::string> panel;  // endpoint ids
    JudgeMode mode = JudgeMode::Comparative;
    std::vector<Dimension> dimensions;
    std::uint64_t seed = 0;
    /// Strings that must not reach a judge (system and model names).
    std::vector<std::string> redact_terms;
    int workers = 1;
};

/// A (case, judge, dimension) left unscored after the re-ask or a gateway failure.
struct ScoreGap {
    std::string case_id;
    std::string judge_id;
    Dimension dimension = Dimension::SomaticAwareness;
    std::string reason;
};

struct JudgeRun {
    std::vector<ScoreSheet> sheets;
    std::vector<ScoreGap> gaps;
};

/// Scores every case on every dimension with every judge. Unparseable
/// replies get one re-ask; a second failure records a gap.
JudgeRun run_judging(const std::vector<JudgeCase>& cases, const JudgeConfig& config, gateway::Gateway& gw,
                     const gateway::RoutingTable& routing, const RubricSet& rubrics);

} // namespace eftcot::judge
