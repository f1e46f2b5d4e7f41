#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/core.hpp"
#include "gibbs/energy.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/marks.hpp"
#include "gibbs/sampler.hpp"

namespace gibbs {

/// Parsed and validated run configuration. Top-level keys: seed (required), model, marks, d, delta,
/// z, window, sampler, boundary, estimator, output.
struct RunConfig {
  nlohmann::json raw;
  std::string command;
  std::uint64_t seed = 0;
  std::shared_ptr<const EnergyModel> model;
  MarkLaw marks = RadiusLaw::point_mass(0.0);
  int d = 2;
  double delta = 1.0;
  double z = 1.0;
  Window window = Window::cube(2, 1.0);
  ChainSettings chain;
  std::size_t chains = 1;
  BoundaryCondition boundary;
  nlohmann::json estimator = nlohmann::json::object();
  std::filesystem::path out_dir;
};

/// Commands run() understands.
inline const std::vector<std::string>& run_commands() {
  static const std::vector<std::string> c{"sample", "entropy", "audit", "dlr", "compat", "diffusion"};
  return c;
}

/// Throws ConfigError on schema violations, unknown keys or a missing seed.
RunConfig parse_config(const nlohmann::json& j, const std::string& command);
/// Overlay flag values on a config (RFC 7386 merge patch).
nlohmann::json apply_overrides(nlohmann::json config, const nlohmann::json& overrides);
nlohmann::json load_json_file(const std::filesystem::path& path);

Window window_from_json(const nlohmann::json& j, int d);

/// $GIBBS_OUT_ROOT, or "runs" when unset.
std::filesystem::path output_root();

struct RunRecord {
  std::filesystem::path manifest;
  std::string manifest_hash;
  std::vector<std::filesystem::path> samples;
  std::vector<std::filesystem::path> reports;
  double wall_seconds = 0.0;
  std::string status;
};

/// Write the manifest, then execute the command and write its sample and report files.
RunRecord run(const RunConfig& config);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string content_hash(const std::string& text);

struct ReportRow {
  std::string quantity;
  double estimate = 0.0;
  double std_error = 0.0;
  double n = 0.0;
};

/// CSV with columns quantity,estimate,stderr,n,model_id,seed after a "# manifest <hash>" line.
void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows, const std::string& model_id,
                  std::uint64_t seed, const std::string& manifest_hash);

/// (x, y, err) series from a report: x = n, y = estimate, err = stderr for rows of the given quantity
/// (the first quantity present when empty). Throws ConfigError on missing columns.
void emit_plot_data(const std::filesystem::path& report, const std::filesystem::path& out,
                    const std::string& quantity = "");

/// (u, phi(u), 0) rows for u = 1.20, 1.21, ..., 3.00.
void write_lj_sweep(const std::filesystem::path& out);

/// Discs from CSV rows cx,cy,r (an optional header line is skipped).
DiscSystem read_disc_csv(const std::filesystem::path& path);

/// 0 for success; 2 config, 3 precondition, 4 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace gibbs
