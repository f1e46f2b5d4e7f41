#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbs/errors.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/harness.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/serialization.hpp"
#include "gibbs/tempered.hpp"

using nlohmann::json;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model, window, boundary, out;
  std::optional<double> z;
  std::optional<std::size_t> steps, burnin, thin, chains;
};

json parse_model_flag(const std::string& s) {
  if (!s.empty() && s.front() == '{') return json::parse(s);
  return json{{"id", s}};
}

// "cube:N" or a JSON window block.
json parse_window_flag(const std::string& s) {
  if (!s.empty() && s.front() == '{') return json::parse(s);
  const auto colon = s.find(':');
  if (s.substr(0, colon) != "cube" || colon == std::string::npos) throw gibbs::ConfigError("--window expects cube:N or JSON");
  return json{{"kind", "cube"}, {"n", std::stod(s.substr(colon + 1))}};
}

json overrides(const RunFlags& f) {
  json o = json::object();
  if (f.seed) o["seed"] = *f.seed;
  if (f.model) o["model"] = parse_model_flag(*f.model);
  if (f.window) o["window"] = parse_window_flag(*f.window);
  if (f.z) o["z"] = *f.z;
  if (f.steps) o["sampler"]["steps"] = *f.steps;
  if (f.burnin) o["sampler"]["burn_in"] = *f.burnin;
  if (f.thin) o["sampler"]["thin"] = *f.thin;
  if (f.chains) o["sampler"]["chains"] = *f.chains;
  if (f.boundary) {
    if (*f.boundary == "free")
      o["boundary"] = json{{"kind", "free"}};
    else
      o["boundary"] = json{{"kind", "file"}, {"path", *f.boundary}};
  }
  if (f.out) o["output"]["dir"] = *f.out;
  return o;
}

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("-c,--config", f.config, "JSON run configuration");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--model", f.model, "model id or JSON block");
  sub->add_option("--window", f.window, "cube:N or JSON window block");
  sub->add_option("--z", f.z, "activity");
  sub->add_option("--steps", f.steps, "chain steps");
  sub->add_option("--burnin", f.burnin, "burn-in steps");
  sub->add_option("--thin", f.thin, "thinning");
  sub->add_option("--chains", f.chains, "independent chains");
  sub->add_option("--boundary", f.boundary, "free or a JSONL configuration file");
  sub->add_option("--out", f.out, "output directory (relative to $GIBBS_OUT_ROOT)");
}

int do_run(const std::string& command, const RunFlags& f) {
  json cfg = f.config.empty() ? json::object() : gibbs::load_json_file(f.config);
  cfg = gibbs::apply_overrides(cfg, overrides(f));
  const auto parsed = gibbs::parse_config(cfg, command);
  const auto rec = gibbs::run(parsed);
  json summary{{"status", rec.status},
               {"manifest", rec.manifest.string()},
               {"manifest_hash", rec.manifest_hash},
               {"wall_seconds", rec.wall_seconds}};
  for (const auto& p : rec.samples) summary["samples"].push_back(p.string());
  for (const auto& p : rec.reports) summary["reports"].push_back(p.string());
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marked Gibbs point process toolkit"};
  app.require_subcommand(1);

  RunFlags flags;
  for (const auto& name : gibbs::run_commands()) add_run_flags(app.add_subcommand(name, "run the " + name + " pipeline"), flags);

  std::string disc_file;
  std::size_t mc_points = 0;
  std::uint64_t geo_seed = 1;
  auto* geo = app.add_subcommand("geometry", "area, perimeter and Euler characteristic of a union of discs");
  geo->add_option("discs", disc_file, "CSV with rows cx,cy,r")->required();
  geo->add_option("--mc", mc_points, "also run the Monte Carlo oracle with this many points");
  geo->add_option("--seed", geo_seed, "oracle seed");

  std::string temper_file;
  int t = 1, d = 2, l = 0;
  double delta = 1.0;
  auto* temper = app.add_subcommand("temper", "temperedness report for configurations in a JSONL file");
  temper->add_option("configs", temper_file, "JSONL configurations")->required();
  temper->add_option("--t", t, "tempered class index");
  temper->add_option("--d", d, "dimension");
  temper->add_option("--delta", delta, "tame exponent offset");
  temper->add_option("--l", l, "radius for the enlarged-class and separation checks (raised to l_range of the minimal t)");

  std::string report, plot_out, quantity;
  bool lj = false;
  auto* plot = app.add_subcommand("plot-data", "(x, y, err) series from a report, or the Lennard-Jones sweep");
  plot->add_option("report", report, "report CSV");
  plot->add_option("--quantity", quantity, "quantity to extract (default: first in file)");
  plot->add_flag("--lj-sweep", lj, "write phi(u) for u in [1.2, 3]");
  plot->add_option("-o,--out", plot_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (const auto& name : gibbs::run_commands())
      if (app.got_subcommand(name)) return do_run(name, flags);

    if (app.got_subcommand(geo)) {
      const auto discs = gibbs::read_disc_csv(disc_file);
      const auto m = gibbs::measure_union(discs);
      json out{{"discs", discs.size()},       {"area", m.area},           {"perimeter", m.perimeter},
               {"euler", m.euler},            {"euler_turning", m.euler_turning},
               {"nerve_truncated", m.nerve_truncated}, {"perturbed", m.perturbed}};
      if (mc_points > 0) {
        gibbs::Rng rng(geo_seed);
        const auto o = gibbs::mc_geometry_oracle(discs, mc_points, rng);
        out["mc"] = {{"area", o.area}, {"area_stderr", o.area_std_error}, {"euler", o.euler},
                     {"grid", o.grid}, {"resolved", o.resolved}};
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (app.got_subcommand(temper)) {
      std::ifstream in(temper_file);
      if (!in) throw gibbs::ConfigError("cannot open " + temper_file);
      const auto configs = gibbs::read_jsonl(in);
      std::cout << "index,points,tempered,minimal_t,l,underline_M,separation\n";
      for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& g = configs[i].config;
        const auto r = gibbs::is_tempered(g, t, d, delta);
        const int l_min = static_cast<int>(std::ceil(gibbs::l_range(r.minimal_t, d, delta)));
        const int l_eff = std::max(l, l_min);
        const auto u = gibbs::in_underline_M(g, l_eff);
        const auto s = gibbs::range_separation_check(g, r.minimal_t, l_eff, delta);
        std::cout << i << ',' << g.size() << ',' << r.tempered << ',' << r.minimal_t << ',' << l_eff << ','
                  << u.holds << ',' << s.holds << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(plot)) {
      if (lj)
        gibbs::write_lj_sweep(plot_out);
      else if (report.empty())
        throw gibbs::ConfigError("plot-data needs a report or --lj-sweep");
      else
        gibbs::emit_plot_data(report, plot_out, quantity);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gibbs::exit_code_for(e);
  }
  return 0;
}
