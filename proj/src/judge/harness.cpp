#include "eftcot/judge/harness.hpp"

#include <optional>
#include <variant>

#include "eftcot/core/parallel.hpp"
#include "eftcot/core/rng.hpp"

namespace eftcot::judge {

namespace {

struct Task {
    std::size_t case_index;
    std::size_t judge_index;
    Dimension dimension;
    std::optional<std::string> system;  // set in absolute mode
};

using Outcome = std::variant<ScoreSheet, ScoreGap>;

std::vector<Dimension> effective_dimensions(const JudgeConfig& config) {
    if (!config.dimensions.empty()) return config.dimensions;
    return {kAllDimensions.begin(), kAllDimensions.end()};
}

void check_config(const std::vector<JudgeCase>& cases, const JudgeConfig& config,
                  const gateway::RoutingTable& routing) {
    if (config.panel.empty()) throw ConfigError("judge panel is empty");
    for (const auto& id : config.panel) {
        if (!routing.has_endpoint(id)) throw ConfigError("judge endpoint '" + id + "' is not configured");
    }
    const std::size_t minimum = config.mode == JudgeMode::Comparative ? 2 : 1;
    for (const auto& c : cases) {
        if (c.responses.size() < minimum) {
            throw Error("case " + c.case_id + " has " + std::to_string(c.responses.size()) + " responses, " +
                        std::to_string(minimum) + " needed");
        }
    }
}

Outcome judge_one(const Task& task, const JudgeCase& jc, const JudgeConfig& config, gateway::Gateway& gw,
                  const gateway::ModelEndpoint& endpoint, const RubricSet& rubrics) {
    BlindedItem item;
    if (task.system) {
        item = single_item(jc.case_id, *task.system, jc.responses.at(*task.system), config.redact_terms);
    } else {
        const auto seed = derive_seed(config.seed, endpoint.id + "|" + std::string(to_string(task.dimension)));
        item = blind_pair(jc.case_id, jc.responses, seed, config.redact_terms);
    }
    gateway::ChatRequest request;
    request.system = render_rubric_prompt(item, rubrics.at(task.dimension), jc.post);
    request.user = "Give the scores now.";
    request.params = endpoint.params;
    request.tag = "judge";

    ScoreGap gap{jc.case_id, endpoint.id, task.dimension, ""};
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply;
        try {
            reply = gw.complete_chat(endpoint, request).text;
        } catch (const gateway::AuthError&) {
            throw;
        } catch (const gateway::GatewayError& e) {
            gap.reason = std::string("gateway: ") + e.what();
            return gap;
        }
        try {
            const auto by_slot = parse_judge_score(reply, item.letters());
            ScoreSheet sheet{jc.case_id, endpoint.id, task.dimension, {}};
            for (const auto& [letter, score] : by_slot) sheet.scores.emplace(item.key.at(letter), score);
            return sheet;
        } catch (const JudgeParseError& e) {
            gap.reason = std::string("unparseable reply: ") + e.what();
            request.user = std::string("Your previous reply could not be read (") + e.what() +
                           "). Reply only with lines of the form \"A: 4\", one per response, scores 1 to 5.";
        }
    }
    return gap;
}

} // namespace

JudgeRun run_judging(const std::vector<JudgeCase>& cases, const JudgeConfig& config, gateway::Gateway& gw,
                     const gateway::RoutingTable& routing, const RubricSet& rubrics) {
    check_config(cases, config, routing);
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        for (std::size_t j = 0; j < config.panel.size(); ++j) {
            for (Dimension d : effective_dimensions(config)) {
                if (config.mode == JudgeMode::Comparative) {
                    tasks.push_back({c, j, d, std::nullopt});
                } else {
                    for (const auto& [system, text] : cases[c].responses) tasks.push_back({c, j, d, system});
                }
            }
        }
    }
    std::vector<std::optional<Outcome>> outcomes(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        outcomes[i] = judge_one(t, cases[t.case_index], config, gw, routing.endpoint(config.panel[t.judge_index]),
                                rubrics);
    });
    JudgeRun run;
    for (auto& o : outcomes) {
        if (auto* sheet = std::get_if<ScoreSheet>(&*o)) run.sheets.push_back(std::move(*sheet));
        else run.gaps.push_back(std::get<ScoreGap>(std::move(*o)));
    }
    return run;
}

} // namespace eftcot::judge
