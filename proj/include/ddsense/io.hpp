#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ddsense/ensemble.hpp"

namespace ddsense {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat UTF-8 `key = value` format, '#' comments. Unknown keys are rejected
// with the offending key named.
ExperimentConfig parse_config_text(std::istream& in, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

// single `key=value` override on top of an existing config
void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value);

std::string protocol_name(Protocol p);
std::string model_name(Model m);

nlohmann::json result_to_json(const ExperimentResult& result);
void write_result_json(std::ostream& out, const ExperimentResult& result);

inline constexpr const char* kResultCsvHeader =
    "tau,er_over_hbar,stderr,mean_sx_per_spin,mean_sy_per_spin,mean_sz_per_spin,"
    "var_sx,var_sy,var_sz";

void write_result_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace ddsense
