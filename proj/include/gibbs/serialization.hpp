#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/core.hpp"

namespace gibbs {

struct ConfigurationMeta {
  std::optional<std::uint64_t> seed;
  std::string model_id;
};

struct TaggedConfiguration {
  Configuration config;
  ConfigurationMeta meta;
};

nlohmann::json mark_to_json(const Mark& m);
Mark mark_from_json(const nlohmann::json& j);

/// One JSON object: {dim, points: [{x, mark: {kind, payload}}], meta: {seed, model_id}}.
/// Doubles are written in shortest round-trip form, so reading back is bit-exact.
nlohmann::json to_json(const Configuration& c, const ConfigurationMeta& meta = {});
TaggedConfiguration from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const Configuration& c, const ConfigurationMeta& meta = {});
std::vector<TaggedConfiguration> read_jsonl(std::istream& in);

/// Throws ConfigError if `j` is not an object or has a key outside `allowed`.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& context);

}  // namespace gibbs
