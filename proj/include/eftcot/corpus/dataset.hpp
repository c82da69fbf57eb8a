#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/types.hpp"

namespace eftcot::corpus {

/// An instruct record with the identity needed for deterministic splitting
/// and stratification.
struct DatasetEntry {
    std::string id;
    TopicCategory category = TopicCategory::Growth;
    InstructRecord record;

    bool operator==(const DatasetEntry&) const = default;
};

struct SplitSpec {
    double train_fraction = 0.9;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Split {
    std::vector<DatasetEntry> train;
    std::vector<DatasetEntry> test;
};

/// Number of training records for N entries: floor(N * fraction).
std::size_t train_size(std::size_t n, double fraction);

/// Sorts by id, seeded Fisher-Yates shuffle, first floor(N * fraction) to train.
Split split_dataset(std::vector<DatasetEntry> records, const SplitSpec& spec);

class InsufficientStratumError : public Error {
public:
    InsufficientStratumError(TopicCategory category, std::size_t available, std::size_t wanted);
    TopicCategory category() const noexcept { return category_; }
    std::size_t available() const noexcept { return available_; }

private:
    TopicCategory category_;
    std::size_t available_;
};

/// Exactly `per_category` entries from each of the nine categories, ordered
/// by category then draw order.
std::vector<DatasetEntry> stratified_sample(const std::vector<DatasetEntry>& entries, std::size_t per_category,
                                            std::uint64_t seed);

/// Instruct-record JSONL line: exactly instruction, input, output.
std::string record_line(const InstructRecord& r);
/// Case line used for evaluation sets: id, category, instruction, input, output.
std::string case_line(const DatasetEntry& e);

/// Training-framework friendly JSON array of instruct records.
ordered_json records_array(const std::vector<DatasetEntry>& entries);

/// Inert metadata describing the student fine-tuning run the dataset targets.
ordered_json training_config_metadata();

} // namespace eftcot::corpus
