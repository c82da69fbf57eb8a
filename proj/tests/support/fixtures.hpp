#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/types.hpp"
#include "eftcot/gateway/gateway.hpp"
#include "eftcot/gateway/routing.hpp"
#include "eftcot/gateway/stub_transport.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(EFTCOT_SOURCE_DIR); }
inline fs::path config_dir() { return source_dir() / "config"; }

class TempDir {
public:
    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        path_ = fs::temp_directory_path() / ("eftcot-test-" + std::to_string(gen()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

inline const std::string kConfessionText =
    "I confessed my past mistakes to the girl I like, the unbearable past I had never told anyone. She blamed "
    "directly the person I used to be, and that direct blame still rings in my ears. Now I feel awkward... I want "
    "to contact her but fear being annoying. I feel I've ruined this destiny.";

inline eftcot::HelpSeekingPost confession_post() {
    return {"confession", kConfessionText, eftcot::TopicCategory::Romance, {}};
}

inline const std::string kConfessionResponse =
    "You opened up about the unbearable past you had never told anyone, and the direct blame that came back must "
    "have felt like ice water poured over your head in the middle of a warm moment. No wonder your chest froze and "
    "you now feel awkward. Sharing secrets is a touchstone of trust and courage; her reaction reflects her "
    "capacity, and it does not mean your past defines your future. What you showed was the courage to share, and "
    "that is worth holding on to.";

/// A complete, valid trace for the confession case.
inline eftcot::ReasoningTrace confession_trace() {
    using namespace eftcot;
    ReasoningTrace t;
    t.post = confession_post();
    t.a1 = EmotionHierarchy{{{"Anxiety", "fear being annoying", EmotionLevel::Secondary},
                             {"Social awkwardness", "awkward", EmotionLevel::Secondary},
                             {"Shame", "blamed directly", EmotionLevel::Primary},
                             {"Grievance", "past mistakes", EmotionLevel::Primary}},
                            std::string("Chest tightness, a drop in body temperature")};
    t.a2 = SomaticMapping{{"chest tightness", "sudden chill"},
                          "It felt like a basin of ice water was poured over my head during a warm date; my chest "
                          "froze instantly."};
    t.a3 = IntegratedState{"I feel naked shame. That blame made me feel like a mistake, and all my awkwardness now "
                           "is a way to avoid being splashed by that ice water again."};
    t.a4 = AdaptiveAssessment{"Awkwardness keeps my self-esteem from further exposure.",
                              "It blocks any chance of repair and closes me off.", Verdict::Maladaptive};
    t.a5 = BeliefSchema{"The real me is not good or clean.",
                        "If I reveal my real self, then I will be rejected or punished."};
    t.a6 = NeedExpression{"Unconditional acceptance and relational safety.",
                          "I need not just forgiveness, but confirmation that I am worthy of love despite my past."};
    t.a7 = NarrativeFrame{"I ruined everything; I am a trouble.",
                          "Sharing secrets is a touchstone of trust and courage. Her reaction reflects her capacity, "
                          "not that my past defines my future.",
                          {"unbearable past", "direct blame"},
                          "ice water",
                          "Affirm the courage to share rather than the outcome."};
    t.a8 = FinalResponse{kConfessionResponse};
    for (Stage s : kAllStages) t.stage_meta[s] = StageMeta{"stub", 0, 0, 0, false};
    return t;
}

inline eftcot::gateway::ModelEndpoint stub_endpoint(const std::string& id = "stub") {
    eftcot::gateway::ModelEndpoint e;
    e.id = id;
    e.base_url = "http://stub.invalid/v1";
    e.model_name = id;
    e.kind = eftcot::gateway::EndpointKind::Stub;
    return e;
}

inline eftcot::gateway::RoutingTable single_route(const std::vector<std::string>& ids = {"stub"}) {
    std::vector<eftcot::gateway::ModelEndpoint> eps;
    for (const auto& id : ids) eps.push_back(stub_endpoint(id));
    return eftcot::gateway::RoutingTable(eps, {}, ids.front());
}

inline std::unique_ptr<eftcot::gateway::Gateway> stub_gateway(std::vector<eftcot::gateway::StubEntry> script,
                                                               std::shared_ptr<eftcot::gateway::StubTransport>* out = nullptr) {
    auto stub = std::make_shared<eftcot::gateway::StubTransport>(std::move(script));
    if (out) *out = stub;
    eftcot::gateway::GatewayOptions opts;
    opts.stub_only = true;
    return std::make_unique<eftcot::gateway::Gateway>(opts, nullptr, stub, [](std::chrono::milliseconds) {});
}

inline eftcot::gateway::StubEntry reply_for(std::string stage, std::string reply, bool repeat = false) {
    eftcot::gateway::StubEntry e;
    e.stage = std::move(stage);
    e.reply = std::move(reply);
    e.repeat = repeat;
    return e;
}

/// Stage replies for the confession case, A1..A8, as JSON text.
inline std::vector<std::string> confession_replies() {
    const auto t = confession_trace();
    std::vector<std::string> out;
    for (eftcot::Stage s : eftcot::kAllStages) out.push_back(eftcot::dump_line(eftcot::to_json(*t.output(s))));
    return out;
}

/// Repeatable script serving the confession replies by stage tag.
inline std::vector<eftcot::gateway::StubEntry> confession_script() {
    std::vector<eftcot::gateway::StubEntry> script;
    const auto replies = confession_replies();
    for (eftcot::Stage s : eftcot::kAllStages) {
        script.push_back(reply_for(std::string(eftcot::to_string(s)), replies[eftcot::stage_index(s)], true));
    }
    return script;
}

} // namespace fixtures
