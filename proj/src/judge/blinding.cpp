#include "eftcot/judge/blinding.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <span>

#include "eftcot/core/rng.hpp"

namespace eftcot::judge {

std::string slot_letter(std::size_t index) {
    if (index >= 26) throw Error("at most 26 responses can be blinded together");
    return std::string(1, static_cast<char>('A' + index));
}

void BlindedItem::validate() const {
    if (key.size() != presentation.size()) throw Error("blinding key size differs from the slot count");
    std::set<std::string> systems;
    for (const auto& slot : presentation) {
        auto it = key.find(slot.letter);
        if (it == key.end()) throw Error("slot " + slot.letter + " has no key entry");
        if (!systems.insert(it->second).second) throw Error("system '" + it->second + "' occupies two slots");
    }
}

std::vector<std::string> BlindedItem::letters() const {
    std::vector<std::string> out;
    for (const auto& s : presentation) out.push_back(s.letter);
    return out;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string redact(const std::string& text, const std::vector<std::string>& terms) {
    std::string out = text;
    for (const auto& term : terms) {
        if (term.empty()) continue;
        const std::string needle = lower_ascii(term);
        std::string lowered = lower_ascii(out);
        std::size_t pos = 0;
        while ((pos = lowered.find(needle, pos)) != std::string::npos) {
            out.replace(pos, term.size(), "[redacted]");
            lowered.replace(pos, term.size(), "[redacted]");
            pos += 10;
        }
    }
    return out;
}

BlindedItem blind_pair(const std::string& case_id, const std::map<std::string, std::string>& responses,
                       std::uint64_t seed, const std::vector<std::string>& redact_terms) {
    if (responses.size() < 2) throw Error("blinding needs at least two responses");
    std::vector<std::string> order;
    for (const auto& [system, text] : responses) order.push_back(system);
    BlindedItem item;
    item.case_id = case_id;
    item.rng_seed = derive_seed(seed, case_id);
    SeededRng rng(item.rng_seed);
    rng.shuffle(std::span<std::string>(order));
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::string letter = slot_letter(i);
        item.presentation.push_back({letter, "Response " + letter, redact(responses.at(order[i]), redact_terms)});
        item.key.emplace(letter, order[i]);
    }
    return item;
}

BlindedItem single_item(const std::string& case_id, const std::string& system, const std::string& text,
                        const std::vector<std::string>& redact_terms) {
    BlindedItem item;
    item.case_id = case_id;
    item.presentation.push_back({"A", "Response A", redact(text, redact_terms)});
    item.key.emplace("A", system);
    return item;
}

std::map<std::string, std::string> derandomize(const BlindedItem& item) {
    item.validate();
    std::map<std::string, std::string> out;
    for (const auto& slot : item.presentation) out.emplace(item.key.at(slot.letter), slot.text);
    return out;
}

} // namespace eftcot::judge
