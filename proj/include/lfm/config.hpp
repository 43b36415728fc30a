#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lfm/experiment.hpp"
#include "lfm/synth.hpp"

namespace lfm {

enum class ValueType { Real, Count, Bool, Text, RealList, CountList };

/// One recognised configuration key.
struct ConfigKey {
    std::string name;
    ValueType type;
    std::string default_value;
    double min = 0.0;  ///< inclusive lower bound for numbers (list elements too)
    double max = 0.0;  ///< inclusive upper bound; ignored when max < min
    bool min_exclusive = false;
    bool max_exclusive = false;
    std::vector<std::string> choices;  ///< allowed Text values; empty = any
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

/// Flat `key = value` run configuration. Every value is validated when set.
class RunConfig {
public:
    RunConfig();

    void set(const std::string& key, const std::string& value);
    /// Accepts `key=value` / `key = value`.
    void set_assignment(const std::string& assignment);
    void load(std::istream& in);

    bool is_set(const std::string& key) const;
    const std::string& raw(const std::string& key) const;

    double real(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;

    std::uint64_t master_seed() const;
    /// Stage seed shared by standalone commands and seed index 0 of experiments.
    std::uint64_t stage_seed() const;

    SynthParams synth_params() const;
    MrleConfig mrle_config() const;
    SprConfig spr_config() const;
    ClassifierConfig classifier_config() const;
    PipelineConfig pipeline_config() const;
    ExperimentConfig experiment_config() const;

    /// `key = value` for every key, in table order.
    std::vector<std::string> snapshot() const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> explicitly_set_;
};

}  // namespace lfm
