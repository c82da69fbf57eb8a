#include "eftcot/corpus/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "eftcot/core/rng.hpp"

namespace eftcot::corpus {

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
}

std::size_t train_size(std::size_t n, double fraction) {
    // The epsilon keeps exact products such as 10 * 0.9 from landing just below an integer.
    return static_cast<std::size_t>(std::floor(static_cast<long double>(n) * fraction + 1e-9L));
}

Split split_dataset(std::vector<DatasetEntry> records, const SplitSpec& spec) {
    spec.validate();
    if (records.empty()) throw Error("cannot split an empty dataset");
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    SeededRng rng(spec.seed);
    rng.shuffle(std::span<DatasetEntry>(records));
    const std::size_t n_train = train_size(records.size(), spec.train_fraction);
    Split out;
    out.train.assign(std::make_move_iterator(records.begin()), std::make_move_iterator(records.begin() + n_train));
    out.test.assign(std::make_move_iterator(records.begin() + n_train), std::make_move_iterator(records.end()));
    return out;
}

InsufficientStratumError::InsufficientStratumError(TopicCategory category, std::size_t available, std::size_t wanted)
    : Error("category " + std::string(to_string(category)) + " has " + std::to_string(available) +
            " records, " + std::to_string(wanted) + " requested"),
      category_(category),
      available_(available) {}

std::vector<DatasetEntry> stratified_sample(const std::vector<DatasetEntry>& entries, std::size_t per_category,
                                            std::uint64_t seed) {
    std::vector<DatasetEntry> out;
    if (per_category == 0) return out;
    for (TopicCategory c : kAllCategories) {
        std::vector<const DatasetEntry*> stratum;
        for (const auto& e : entries) {
            if (e.category == c) stratum.push_back(&e);
        }
        if (stratum.size() < per_category) throw InsufficientStratumError(c, stratum.size(), per_category);
        std::sort(stratum.begin(), stratum.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
        SeededRng rng(derive_seed(seed, to_string(c)));
        rng.shuffle(std::span<const DatasetEntry*>(stratum));
        for (std::size_t i = 0; i < per_category; ++i) out.push_back(*stratum[i]);
    }
    return out;
}

std::string record_line(const InstructRecord& r) { return dump_line(to_json(r)); }

std::string case_line(const DatasetEntry& e) {
    ordered_json j;
    j["id"] = e.id;
    j["category"] = std::string(to_string(e.category));
    j["instruction"] = e.record.instruction;
    j["input"] = e.record.input;
    j["output"] = e.record.output;
    return dump_line(j);
}

ordered_json records_array(const std::vector<DatasetEntry>& entries) {
    ordered_json a = ordered_json::array();
    for (const auto& e : entries) a.push_back(to_json(e.record));
    return a;
}

ordered_json training_config_metadata() {
    ordered_json j;
    j["note"] = "Descriptive metadata for downstream fine-tuning tools; nothing in this toolchain trains a model.";
    j["base_model"] = "Qwen-2.5-7B-Instruct";
    j["framework"] = "LLaMA-Factory";
    j["finetuning_type"] = "lora";
    j["lora_rank"] = 32;
    j["lora_alpha"] = 64;
    j["lora_dropout"] = 0.1;
    j["lora_target"] = "all";
    j["num_train_epochs"] = 3;
    j["per_device_train_batch_size"] = 8;
    j["gradient_accumulation_steps"] = 16;
    j["learning_rate"] = 1.0e-4;
    j["lr_scheduler_type"] = "cosine";
    j["warmup_steps"] = 0;
    j["bf16"] = true;
    j["inference"] = ordered_json{{"temperature", 0.01}, {"top_p", 0.7}, {"max_new_tokens", 1500}};
    return j;
}

} // namespace eftcot::corpus
