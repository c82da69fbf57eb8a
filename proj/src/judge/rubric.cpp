#include "eftcot/judge/rubric.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "eftcot/core/unicode.hpp"

namespace eftcot::judge {

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::SomaticAwareness: return "SomaticAwareness";
        case Dimension::EmotionalHierarchy: return "EmotionalHierarchy";
        case Dimension::CognitiveInsight: return "CognitiveInsight";
        case Dimension::NeedAnalysis: return "NeedAnalysis";
        case Dimension::RestructuringPower: return "RestructuringPower";
        case Dimension::Relevance: return "Relevance";
        case Dimension::EmpathyDepth: return "EmpathyDepth";
        case Dimension::Helpfulness: return "Helpfulness";
        case Dimension::StructuralProfessionalism: return "StructuralProfessionalism";
    }
    return "?";
}

std::string_view display_name(Dimension d) {
    switch (d) {
        case Dimension::SomaticAwareness: return "Somatic Awareness";
        case Dimension::EmotionalHierarchy: return "Emotional Hierarchy";
        case Dimension::CognitiveInsight: return "Cognitive Insight";
        case Dimension::NeedAnalysis: return "Need Analysis";
        case Dimension::RestructuringPower: return "Restructuring Power";
        case Dimension::Relevance: return "Relevance";
        case Dimension::EmpathyDepth: return "Empathy Depth";
        case Dimension::Helpfulness: return "Helpfulness";
        case Dimension::StructuralProfessionalism: return "Structural Professionalism";
    }
    return "?";
}

std::string_view short_name(Dimension d) {
    switch (d) {
        case Dimension::Relevance: return "Rel.";
        case Dimension::EmpathyDepth: return "Emp.";
        case Dimension::Helpfulness: return "Help.";
        case Dimension::StructuralProfessionalism: return "Struct.";
        default: return display_name(d);
    }
}

namespace {

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

} // namespace

Dimension parse_dimension(std::string_view s) {
    const std::string key = squash(s);
    for (Dimension d : kAllDimensions) {
        if (squash(to_string(d)) == key || squash(display_name(d)) == key) return d;
    }
    if (key == "narrativerestructuring" || key == "narrativerestructuringpower") return Dimension::RestructuringPower;
    if (key == "empatheticdepth") return Dimension::EmpathyDepth;
    throw UnknownDimensionError("unknown dimension '" + std::string(s) + "'");
}

void Rubric::validate() const {
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i].score != static_cast<int>(i) + 1) {
            throw RubricError(std::string(to_string(dimension)) + ": anchors must be scored 1..5 in order");
        }
        if (text::is_blank(anchors[i].text)) {
            throw RubricError(std::string(to_string(dimension)) + ": anchor " + std::to_string(i + 1) + " is empty");
        }
    }
}

namespace {

Rubric make(Dimension d, std::string definition, std::array<RubricAnchor, 5> anchors) {
    return Rubric{d, std::move(definition), std::move(anchors)};
}

} // namespace

Rubric default_rubric(Dimension d) {
    switch (d) {
        case Dimension::SomaticAwareness:
            return make(d, R"x(Evaluates whether the response constructs highly contextualized somatic metaphors.)x",
                        {{
                            {1, R"x(Poor)x", R"x(No description of physical sensations, or use of highly abstract vocabulary (e.g., "felt bad").)x"},
                            {2, R"x(Fair)x", R"x(Attempts to mention body parts, but descriptions are rigid or limited to the physical level (e.g., "head hurts slightly"), lacking emotional coloring.)x"},
                            {3, R"x(Moderate)x", R"x(Uses generic, stereotypical somatic metaphors (e.g., "like a heavy stone crushing me"), providing imagery but lacking novelty.)x"},
                            {4, R"x(Good)x", R"x(Constructs relatively apt metaphors that integrate with some user context, but slightly falls short in nuance or uniqueness compared to the full score (e.g., "like being strangled by a rope").)x"},
                            {5, R"x(Excellent)x", R"x(Constructs unique, highly contextualized metaphors deeply embedded in the user's story (e.g., "like a rusty gear stuck and unable to turn"), evoking strong physiological resonance.)x"}
                        }});
        case Dimension::EmotionalHierarchy:
            return make(d, R"x(Evaluates whether the model can precisely distinguish between primary and secondary emotions and translate them into nuanced language.)x",
                        {{
                            {1, R"x(Poor)x", R"x(Merely repeats emotional words from the user's text or misidentifies emotions.)x"},
                            {2, R"x(Fair)x", R"x(Identifies surface emotions, but language is mechanical, repetitive, and lacks depth.)x"},
                            {3, R"x(Moderate)x", R"x(Identifies major emotions but fails to clearly distinguish between primary/secondary levels; expression is plain.)x"},
                            {4, R"x(Good)x", R"x(Distinguishes emotional levels and attempts to describe mixed emotions, but lexical precision or infectiousness could be improved.)x"},
                            {5, R"x(Excellent)x", R"x(Precisely penetrates surface defenses (secondary emotions) to pinpoint underlying primary emotions, using nuanced vocabulary to depict the blended and fluid state of emotions.)x"}
                        }});
        case Dimension::CognitiveInsight:
            return make(d, R"x(Evaluates whether the response achieves depathologization and identifies core beliefs.)x",
                        {{
                            {1, R"x(Poor)x", R"x(Attempts to eliminate or deny negative emotions, or fails to mention the belief level entirely.)x"},
                            {2, R"x(Fair)x", R"x(Merely states "it is normal to feel this way" without explaining its specific function; or speculation on beliefs deviates from the user's actual experience.)x"},
                            {3, R"x(Moderate)x", R"x(Expresses acceptance of emotions but fails to explain their protective function; or identifies only surface thoughts rather than core beliefs.)x"},
                            {4, R"x(Good)x", R"x(Explains emotional functions well or accurately identifies core beliefs, but the integration of the two is not sufficiently tight or natural.)x"},
                            {5, R"x(Excellent)x", R"x(Explicitly points out the positive significance of negative emotions in the moment, and gently yet precisely uncovers self-limiting beliefs in the subconscious.)x"}
                        }});
        case Dimension::NeedAnalysis:
            return make(d, R"x(Evaluates whether the response uncovers deep psychological needs based on Self-Determination Theory (SDT).)x",
                        {{
                            {1, R"x(Poor)x", R"x(Responds only to superficial, concrete requests without addressing psychological needs.)x"},
                            {2, R"x(Fair)x", R"x(Vaguely mentions emotional needs, lacking theoretical support and specificity.)x"},
                            {3, R"x(Moderate)x", R"x(Mentions generic psychological needs but fails to integrate them with user characteristics.)x"},
                            {4, R"x(Good)x", R"x(Identifies specific SDT needs (e.g., autonomy), but the expression is slightly theoretical and not sufficiently touching.)x"},
                            {5, R"x(Excellent)x", R"x(Precisely connects to deep attachment or existential needs, striking directly at the core pain point.)x"}
                        }});
        case Dimension::RestructuringPower:
            return make(d, R"x(Evaluates whether the response guides the construction of a new, self-compassionate narrative.)x",
                        {{
                            {1, R"x(Poor)x", R"x(Remains at the level of sympathy/reassurance or gives direct action advice, with no narrative-level shift.)x"},
                            {2, R"x(Fair)x", R"x(Attempts to offer a positive perspective but carries a "preachy" or "blindly optimistic" tone that invites resistance.)x"},
                            {3, R"x(Moderate)x", R"x(Attempts to offer a positive perspective but feels stiff or like "clichéd platitudes," not naturally connecting with the preceding emotional exploration.)x"},
                            {4, R"x(Good)x", R"x(Proposes a reasonable direction for the new narrative with sound logic, but emotional tension or sense of empowerment is slightly weak.)x"},
                            {5, R"x(Excellent)x", R"x(Based on full empathy, naturally implants a new, powerful perspective, guiding the user from "victim" to "survivor" or "experiencer," filled with self-compassion.)x"}
                        }});
        case Dimension::Relevance:
            return make(d, R"x(Evaluates whether the response is pertinent, adhering to the user's core distress and specific details, while being free from factual errors (hallucinations) or irrelevance.)x",
                        {{
                            {1, R"x(Irrelevant)x", R"x(Severely off-topic, irrelevant, or contains serious logical errors and factual hallucinations.)x"},
                            {2, R"x(Poor)x", R"x(Mentions the topic but overlooks the core conflict in the user's description (e.g., ignoring suicide risk) or responds only to minor details.)x"},
                            {3, R"x(Fair)x", R"x(On-topic and answers the main question, but the response is generic and lacks engagement with specific background details.)x"},
                            {4, R"x(Good)x", R"x(Closely aligns with the topic, capturing and responding to most details (e.g., time, location, people) with clear logic.)x"},
                            {5, R"x(Excellent)x", R"x(Precise response. Not only addresses explicit content but also keenly captures implicit intentions, with no context detachment, perfectly fitting the user's situational context.)x"}
                        }});
        case Dimension::EmpathyDepth:
            return make(d, R"x(Evaluates whether the response demonstrates a deep understanding and acceptance of the user's emotions and establishes a therapeutic alliance.)x",
                        {{
                            {1, R"x(Cold)x", R"x(Indifferent, mechanical, or judgmental/accusatory, damaging the therapeutic relationship.)x"},
                            {2, R"x(Robotic)x", R"x(Polite but robotic (resembling customer service templates), lacking genuine emotional warmth, creating a strong sense of distance.)x"},
                            {3, R"x(Surface)x", R"x(Provides basic understanding and comfort with a gentle attitude, but remains at the level of surface emotional validation without nuance.)x"},
                            {4, R"x(Deep)x", R"x(Establishes a deeper emotional connection, identifies mixed emotions, and uses warm, supportive language to make the user feel comfortable.)x"},
                            {5, R"x(Soulful)x", R"x(Profound resonance. Precisely identifies deep-seated emotions (e.g., fear behind anger) and uses highly infectious or concrete language (e.g., apt metaphors) to provide a customized response, making the user feel "deeply seen.")x"}
                        }});
        case Dimension::Helpfulness:
            return make(d, R"x(Evaluates whether the response can alleviate distress, provide new perspectives, or offer effective support, demonstrating clinical efficacy.)x",
                        {{
                            {1, R"x(Harmful)x", R"x(Harmful advice that may aggravate anxiety, or suggestions that are completely infeasible or unethical.)x"},
                            {2, R"x(Useless)x", R"x("Correct but useless" (tautological platitudes). Logically sound but offers no actual help in resolving the distress.)x"},
                            {3, R"x(Standard)x", R"x(Offers standard advice with some reference value but lacks specificity.)x"},
                            {4, R"x(Actionable)x", R"x(Advice is concrete, feasible, and context-appropriate, or provides high-quality emotional support that effectively alleviates immediate anxiety.)x"},
                            {5, R"x(Inspiring)x", R"x(Highly inspiring. Not only soothes emotions but also helps the user explore underlying psychological mechanisms or provides a completely new perspective, leading to relief, empowerment, or insight.)x"}
                        }});
        case Dimension::StructuralProfessionalism:
            return make(d, R"x(Evaluates whether the response follows a coherent and professional helping logic and rhythm, aligning with evidence-based practice workflows.)x",
                        {{
                            {1, R"x(Chaotic)x", R"x(Chaotic structure, disjointed logic, or serious errors such as "premature advice-giving" (advising without listening).)x"},
                            {2, R"x(Loose)x", R"x(Loose structure; contains comfort and advice, but lacks transitions between the two, appearing abrupt or rushed.)x"},
                            {3, R"x(Basic)x", R"x(Basic helping structure (e.g., "empathy before advice"), conforming to general helping logic but lacking the rigor of specific therapeutic schools.)x"},
                            {4, R"x(Organized)x", R"x(Organized structure with natural transitions, capable of guiding the dialogue deeper, demonstrating good counseling rhythm.)x"},
                            {5, R"x(Masterful)x", R"x(Masterful rhythm. Strictly adheres to professional paradigms of psychological counseling (e.g., progressive exploration and intervention), with sufficient groundwork and strong support, demonstrating extremely high professional literacy.)x"}
                        }});
    }
    throw UnknownDimensionError("no built-in rubric");
}

Rubric parse_rubric(std::string_view content, Dimension d) {
    Rubric r;
    r.dimension = d;
    std::array<bool, 5> seen{};
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("definition:", 0) == 0) {
            r.definition = text::trim(std::string_view(t).substr(11));
            continue;
        }
        const auto colon = t.find(':');
        const auto open = t.find('(');
        const auto close = t.find(')');
        if (t[0] < '1' || t[0] > '5' || colon == std::string::npos || open == std::string::npos ||
            close == std::string::npos || !(open < close && close < colon)) {
            throw RubricError(std::string(to_string(d)) + " line " + std::to_string(number) +
                              ": expected 'N (Label): text'");
        }
        const int score = t[0] - '0';
        auto& a = r.anchors[static_cast<std::size_t>(score - 1)];
        if (seen[static_cast<std::size_t>(score - 1)]) {
            throw RubricError(std::string(to_string(d)) + ": score " + std::to_string(score) + " given twice");
        }
        seen[static_cast<std::size_t>(score - 1)] = true;
        a.score = score;
        a.label = text::trim(std::string_view(t).substr(open + 1, close - open - 1));
        a.text = text::trim(std::string_view(t).substr(colon + 1));
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) throw RubricError(std::string(to_string(d)) + ": missing anchor " + std::to_string(i + 1));
    }
    r.validate();
    return r;
}

std::string format_rubric(const Rubric& r) {
    std::string out = "definition: " + r.definition + "\n";
    for (const auto& a : r.anchors) out += std::to_string(a.score) + " (" + a.label + "): " + a.text + "\n";
    return out;
}

RubricSet::RubricSet() {
    for (Dimension d : kAllDimensions) rubrics_.emplace(d, default_rubric(d));
}

RubricSet RubricSet::load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("rubric directory " + dir.string() + " not found");
    RubricSet set;
    for (Dimension d : kAllDimensions) {
        const auto path = dir / (std::string(to_string(d)) + ".txt");
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        if (!in) throw IoError("cannot read " + path.string());
        std::stringstream buf;
        buf << in.rdbuf();
        set.set(parse_rubric(buf.str(), d));
    }
    return set;
}

void RubricSet::set(Rubric r) {
    r.validate();
    rubrics_[r.dimension] = std::move(r);
}

} // namespace eftcot::judge
