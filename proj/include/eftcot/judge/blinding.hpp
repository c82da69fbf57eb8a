#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eftcot/core/error.hpp"

namespace eftcot::judge {

struct Slot {
    std::string letter;  // "A"
    std::string label;   // "Response A"
    std::string text;

    bool operator==(const Slot&) const = default;
};

struct BlindedItem {
    std::string case_id;
    std::vector<Slot> presentation;
    /// Slot letter to system id. Hidden from judges.
    std::map<std::string, std::string> key;
    std::uint64_t rng_seed = 0;

    /// Throws unless `key` is a bijection between the slot letters and distinct system ids.
    void validate() const;
    std::vector<std::string> letters() const;
};

std::string slot_letter(std::size_t index);

/// Seeded uniform slot permutation of the responses. Occurrences of
/// `redact_terms` in the texts are replaced case-insensitively with "[redacted]".
BlindedItem blind_pair(const std::string& case_id, const std::map<std::string, std::string>& responses,
                       std::uint64_t seed, const std::vector<std::string>& redact_terms = {});

/// One-slot item for absolute scoring of a single system.
BlindedItem single_item(const std::string& case_id, const std::string& system, const std::string& text,
                        const std::vector<std::string>& redact_terms = {});

/// System id to presented text.
std::map<std::string, std::string> derandomize(const BlindedItem& item);

std::string redact(const std::string& text, const std::vector<std::string>& terms);

} // namespace eftcot::judge
