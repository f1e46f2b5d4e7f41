#include "gibbs/serialization.hpp"

#include <istream>
#include <ostream>

#include "gibbs/errors.hpp"

namespace gibbs {

using nlohmann::json;

json mark_to_json(const Mark& m) {
  if (m.kind() == Mark::Kind::radius) return json{{"kind", "radius"}, {"payload", m.radius_value()}};
  json pts = json::array();
  for (const auto& s : m.path_data().samples) pts.push_back(json::array({s[0], s[1]}));
  return json{{"kind", "path"}, {"payload", std::move(pts)}};
}

Mark mark_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "radius") return Mark::radius(j.at("payload").get<double>());
  if (kind == "path") {
    std::vector<std::array<double, 2>> samples;
    for (const auto& p : j.at("payload")) samples.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return Mark::path(make_path(std::move(samples)));
  }
  throw ConfigError("unknown mark kind '" + kind + "'");
}

json to_json(const Configuration& c, const ConfigurationMeta& meta) {
  json pts = json::array();
  for (const auto& p : c.points()) {
    json x = json::array();
    for (int i = 0; i < c.dim(); ++i) x.push_back(p.x[i]);
    pts.push_back(json{{"x", std::move(x)}, {"mark", mark_to_json(p.mark)}});
  }
  json m = json::object();
  m["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
  m["model_id"] = meta.model_id;
  return json{{"dim", c.dim()}, {"points", std::move(pts)}, {"meta", std::move(m)}};
}

TaggedConfiguration from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    std::vector<MarkedPoint> pts;
    for (const auto& p : j.at("points")) {
      const auto& x = p.at("x");
      if (static_cast<int>(x.size()) != dim) throw ConfigError("point coordinate count differs from dim");
      Location loc{};
      for (int i = 0; i < dim; ++i) loc[i] = x.at(i).get<double>();
      pts.emplace_back(loc, mark_from_json(p.at("mark")));
    }
    ConfigurationMeta meta;
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      if (m.contains("seed") && !m.at("seed").is_null()) meta.seed = m.at("seed").get<std::uint64_t>();
      if (m.contains("model_id")) meta.model_id = m.at("model_id").get<std::string>();
    }
    return {Configuration(dim, std::move(pts)), std::move(meta)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration record: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const Configuration& c, const ConfigurationMeta& meta) {
  out << to_json(c, meta).dump() << '\n';
}

std::vector<TaggedConfiguration> read_jsonl(std::istream& in) {
  std::vector<TaggedConfiguration> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid JSONL line: ") + e.what());
    }
    out.push_back(from_json(j));
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

}  // namespace gibbs
