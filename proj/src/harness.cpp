#include "gibbs/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <variant>

#include "gibbs/discrete.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/estimators.hpp"
#include "gibbs/serialization.hpp"
#include "gibbs/tempered.hpp"

#ifndef GIBBS_VERSION
#define GIBBS_VERSION "unknown"
#endif

namespace gibbs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Location location_from(const json& j, int d, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != d) throw ConfigError(std::string(what) + " must have d coordinates");
  Location x{};
  for (int i = 0; i < d; ++i) x[i] = v[static_cast<std::size_t>(i)];
  return x;
}

ChainSettings chain_from_json(const json& j, std::size_t& chains) {
  check_keys(j, {"steps", "burn_in", "thin", "chains", "mix", "max_points", "drift_interval"}, "sampler");
  ChainSettings s;
  s.burn_in = j.value("burn_in", std::size_t{100000});
  s.steps = j.value("steps", s.burn_in + 100000);
  s.thin = j.value("thin", std::size_t{100});
  s.drift_interval = j.value("drift_interval", std::size_t{10000});
  chains = j.value("chains", std::size_t{1});
  if (chains == 0) throw ConfigError("sampler.chains must be >= 1");
  if (j.contains("max_points")) s.max_points = j.at("max_points").get<std::size_t>();
  if (j.contains("mix")) {
    const auto& m = j.at("mix");
    check_keys(m, {"birth", "death", "move", "remark", "move_scale"}, "sampler.mix");
    s.mix.birth = m.value("birth", s.mix.birth);
    s.mix.death = m.value("death", s.mix.death);
    s.mix.move = m.value("move", s.mix.move);
    s.mix.remark = m.value("remark", s.mix.remark);
    s.mix.move_scale = m.value("move_scale", s.mix.move_scale);
  }
  s.mix.validate();
  if (s.steps <= s.burn_in) throw ConfigError("sampler.steps must exceed sampler.burn_in");
  if (s.thin == 0) throw ConfigError("sampler.thin must be >= 1");
  return s;
}

BoundaryCondition boundary_from_json(const json& j, double delta) {
  check_keys(j, {"kind", "path", "t"}, "boundary");
  const auto kind = j.value("kind", std::string("free"));
  if (kind == "free") return BoundaryCondition::free();
  if (kind != "file") throw ConfigError("boundary.kind must be 'free' or 'file'");
  const fs::path path = j.at("path").get<std::string>();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open boundary file " + path.string());
  auto tagged = read_jsonl(in);
  if (tagged.empty()) throw ConfigError("boundary file holds no configuration");
  return BoundaryCondition::conditioned(std::move(tagged.front().config), j.value("t", 1), delta);
}

std::string format_double(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ConfigGenerator poisson_generator(const RunConfig& c, const Window& w) {
  return [&c, w](Rng& rng) { return sample_poisson(w, c.z, c.marks, rng); };
}

std::vector<ReportRow> run_entropy(const RunConfig& c) {
  const auto& e = c.estimator;
  check_keys(e, {"n_list", "nodes", "beta_power", "is_samples", "c_audit"}, "estimator");
  EntropyCurveSettings s;
  s.n_list = e.value("n_list", std::vector<int>{1, 2, 3});
  s.d = c.d;
  s.z = c.z;
  s.delta = c.delta;
  s.chain = c.chain;
  s.thermo.nodes = e.value("nodes", 8);
  s.thermo.beta_power = e.value("beta_power", 1.0);
  s.thermo.chain = c.chain;
  s.is_samples = e.value("is_samples", std::size_t{20000});
  if (e.contains("c_audit")) s.c_audit = e.at("c_audit").get<double>();
  Rng rng(c.seed, 0);
  const auto rows = specific_entropy_curve(c.model, c.marks, s, rng);
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    const double n = r.n;
    out.push_back({"entropy_per_volume", r.entropy.per_volume, r.entropy.per_volume_se, n});
    out.push_back({"ceiling", r.ceiling, r.ceiling_se, n});
    out.push_back({"entropy", r.entropy.entropy, r.entropy.std_error, n});
    out.push_back({"log_z", r.entropy.log_z, r.entropy.log_z_se, n});
    out.push_back({"mean_energy", r.entropy.mean_energy, r.entropy.mean_energy_se, n});
    out.push_back({"j_statistic", r.j.mean, r.j.std_error, n});
    out.push_back({"c_hat", r.c_hat, 0.0, n});
  }
  return out;
}

std::vector<ReportRow> run_audit(const RunConfig& c) {
  const auto& e = c.estimator;
  check_keys(e, {"trials", "two_sided", "local_trials", "t", "env_window"}, "estimator");
  const std::size_t trials = e.value("trials", std::size_t{1000});
  Rng rng(c.seed, 0);
  std::vector<ReportRow> out;
  const auto rep = stability_audit(*c.model, poisson_generator(c, c.window), trials, c.delta, rng,
                                   e.value("two_sided", false));
  out.push_back({"c_hat", rep.c_hat, 0.0, static_cast<double>(rep.used)});
  out.push_back({"infinite_trials", static_cast<double>(rep.infinite), 0.0, static_cast<double>(rep.trials)});
  const std::size_t local = e.value("local_trials", std::size_t{0});
  if (local > 0) {
    const int t = e.value("t", 1);
    const Window outer = window_from_json(e.value("env_window", json{{"kind", "cube"}, {"n", 4.0}}), c.d);
    Rng lrng(c.seed, 1);
    ConfigGenerator env = [&c, outer, t](Rng& r) {
      Configuration g = sample_poisson(outer, c.z, c.marks, r);
      const auto rep_t = is_tempered(g, t, c.d, c.delta);
      if (!rep_t.tempered) return Configuration(c.d);
      return g;
    };
    const auto lrep = local_stability_audit(*c.model, c.window, t, poisson_generator(c, c.window), env, local, c.delta, lrng);
    out.push_back({"c_hat_local", lrep.c_hat, 0.0, static_cast<double>(lrep.used)});
  }
  if (c.model->id() == "diffusion") {
    const auto f = lj_floor();
    out.push_back({"lj_floor_u", f.u_min, 0.0, 1.0});
    out.push_back({"lj_floor_phi", f.phi_min, 0.0, 1.0});
  }
  return out;
}

std::vector<ReportRow> run_dlr(const RunConfig& c) {
  const auto& e = c.estimator;
  check_keys(e, {"inner_window", "outer", "inner", "k", "kernel"}, "estimator");
  const Window inner_w = window_from_json(e.at("inner_window"), c.d);
  const std::size_t n_outer = e.value("outer", std::size_t{200});
  const std::size_t n_inner = e.value("inner", std::size_t{100});
  const double k = e.value("k", 3.0);
  const auto kernel_kind = e.value("kernel", std::string(c.model->nonnegative() ? "rejection" : "chain"));
  Rng outer_rng(c.seed, 0), inner_rng(c.seed, 1);
  std::vector<Configuration> outer;
  if (c.model->nonnegative()) {
    RejectionSampler s(*c.model, c.window, c.z, c.marks);
    for (std::size_t i = 0; i < n_outer; ++i) outer.push_back(s.draw(outer_rng));
  } else {
    ChainSettings s = c.chain;
    s.steps = s.burn_in + n_outer * s.thin;
    run_chain(*c.model, c.window, c.z, c.marks, BoundaryCondition::free(), s, outer_rng,
              [&](const Configuration& g, const Energy&, std::size_t) { outer.push_back(g); });
  }
  KernelSampler kernel;
  if (kernel_kind == "rejection")
    kernel = rejection_kernel(*c.model, inner_w, c.z, c.marks);
  else if (kernel_kind == "chain")
    kernel = chain_kernel(*c.model, inner_w, c.z, c.marks, c.chain);
  else
    throw ConfigError("estimator.kernel must be 'rejection' or 'chain'");
  const auto reps = dlr_residual(outer, inner_w, kernel, n_inner, inner_rng, k);
  std::vector<ReportRow> out;
  double fails = 0.0;
  for (const auto& r : reps) {
    out.push_back({"dlr_" + r.functional, r.residual, r.std_error, static_cast<double>(r.n_outer)});
    if (!r.pass) fails += 1.0;
  }
  out.push_back({"dlr_failures", fails, 0.0, static_cast<double>(reps.size())});
  return out;
}

std::vector<ReportRow> run_compat(const RunConfig& c) {
  const auto& e = c.estimator;
  check_keys(e, {"lambda_sites"}, "estimator");
  DiscreteInstance inst = DiscreteInstance::micro(c.z > 0.0 ? c.z : 1.0);
  inst.max_points.reset();
  const auto sites = e.value("lambda_sites", std::vector<std::size_t>{0, 1});
  const auto rep = kernel_compatibility_check(*c.model, inst, sites);
  return {{"compat_tv", rep.tv, 0.0, static_cast<double>(rep.states)},
          {"compat_max_abs", rep.max_abs, 0.0, static_cast<double>(rep.states)}};
}

std::vector<ReportRow> run_diffusion(const RunConfig& c) {
  const auto& e = c.estimator;
  check_keys(e, {"invariant_samples", "burn_in", "thin", "moment_samples"}, "estimator");
  const auto* spec = std::get_if<LangevinSpec>(&c.marks);
  if (!spec) throw ConfigError("the diffusion command needs Langevin marks");
  Rng rng(c.seed, 0), mrng(c.seed, 1);
  std::vector<ReportRow> out;
  if (spec->potential.a > 0.0) {
    const auto inv = langevin_invariant_check(*spec, e.value("burn_in", std::size_t{1000}),
                                              e.value("invariant_samples", std::size_t{100000}),
                                              e.value("thin", std::size_t{10}), rng);
    out.push_back({"ks_distance", inv.ks_distance, 0.0, static_cast<double>(inv.n)});
    out.push_back({"ks_p_value", inv.p_value, 0.0, static_cast<double>(inv.n)});
  }
  const auto m = super_exp_moment_estimate(c.marks, c.d, c.delta, e.value("moment_samples", std::size_t{10000}), mrng);
  out.push_back({"moment", m.mean, m.std_error, static_cast<double>(m.n)});
  out.push_back({"moment_diverged", m.diverged ? 1.0 : 0.0, 0.0, static_cast<double>(m.n)});
  const auto f = lj_floor();
  out.push_back({"lj_floor_u", f.u_min, 0.0, 1.0});
  out.push_back({"lj_floor_phi", f.phi_min, 0.0, 1.0});
  return out;
}

}  // namespace

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
}

json apply_overrides(json config, const json& overrides) {
  config.merge_patch(overrides);
  return config;
}

Window window_from_json(const json& j, int d) {
  check_keys(j, {"kind", "n", "lo", "hi", "center", "radius"}, "window");
  const auto kind = j.value("kind", std::string("cube"));
  if (kind == "cube") {
    check_keys(j, {"kind", "n"}, "window");
    return Window::cube(d, j.value("n", 1.0));
  }
  if (kind == "box") {
    check_keys(j, {"kind", "lo", "hi"}, "window");
    return Window::box(d, location_from(j.at("lo"), d, "window.lo"), location_from(j.at("hi"), d, "window.hi"));
  }
  if (kind == "ball") {
    check_keys(j, {"kind", "center", "radius"}, "window");
    return Window::ball(d, location_from(j.at("center"), d, "window.center"), j.at("radius").get<double>());
  }
  throw ConfigError("unknown window kind '" + kind + "'");
}

RunConfig parse_config(const json& j, const std::string& command) {
  try {
    check_keys(j, {"seed", "model", "marks", "d", "delta", "z", "window", "sampler", "boundary", "estimator", "output"},
               "config");
    bool known = false;
    for (const auto& c : run_commands()) known = known || c == command;
    if (!known) throw ConfigError("unknown command '" + command + "'");
    RunConfig c;
    c.raw = j;
    c.command = command;
    if (!j.contains("seed")) throw ConfigError("config must set a seed");
    const auto& seed = j.at("seed");
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.d = j.value("d", 2);
    if (c.d < 1 || c.d > kMaxDim) throw ConfigError("d must lie in [1, 3]");
    c.delta = j.value("delta", 1.0);
    if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw ConfigError("delta must be > 0");
    c.z = j.value("z", 1.0);
    if (!(c.z >= 0.0) || !std::isfinite(c.z)) throw ConfigError("z must be finite and >= 0");
    c.model = make_model(j.value("model", json{{"id", "poisson"}}));
    c.marks = mark_law_from_json(j.value("marks", json{{"kind", "point-mass"}, {"r", 0.0}}));
    c.window = window_from_json(j.value("window", json{{"kind", "cube"}, {"n", 1.0}}), c.d);
    c.chain = chain_from_json(j.value("sampler", json::object()), c.chains);
    c.boundary = boundary_from_json(j.value("boundary", json{{"kind", "free"}}), c.delta);
    c.estimator = j.value("estimator", json::object());
    if (!c.estimator.is_object()) throw ConfigError("estimator must be an object");
    if (command == "sample") check_keys(c.estimator, {}, "estimator");
    if (command == "entropy") check_keys(c.estimator, {"n_list", "nodes", "beta_power", "is_samples", "c_audit"}, "estimator");
    if (command == "audit")
      check_keys(c.estimator, {"trials", "two_sided", "local_trials", "t", "env_window"}, "estimator");
    if (command == "dlr") check_keys(c.estimator, {"inner_window", "outer", "inner", "k", "kernel"}, "estimator");
    if (command == "compat") check_keys(c.estimator, {"lambda_sites"}, "estimator");
    if (command == "diffusion")
      check_keys(c.estimator, {"invariant_samples", "burn_in", "thin", "moment_samples"}, "estimator");
    const json out = j.value("output", json::object());
    check_keys(out, {"dir"}, "output");
    const fs::path dir = out.value("dir", command + "-" + std::to_string(c.seed));
    c.out_dir = dir.is_absolute() ? dir : output_root() / dir;
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

fs::path output_root() {
  const char* env = std::getenv("GIBBS_OUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_report(const fs::path& path, const std::vector<ReportRow>& rows, const std::string& model_id,
                  std::uint64_t seed, const std::string& manifest_hash) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report " + path.string());
  out << "# manifest " << manifest_hash << "\n";
  out << "quantity,estimate,stderr,n,model_id,seed\n";
  for (const auto& r : rows)
    out << r.quantity << ',' << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
        << format_double(r.n) << ',' << model_id << ',' << seed << '\n';
}

RunRecord run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  fs::create_directories(c.out_dir);

  const json manifest{{"command", c.command}, {"config", c.raw}, {"version", GIBBS_VERSION}, {"seed", c.seed}};
  const std::string text = manifest.dump(2);
  rec.manifest_hash = content_hash(text);
  rec.manifest = c.out_dir / "manifest.json";
  {
    std::ofstream m(rec.manifest);
    if (!m) throw ConfigError("cannot write manifest " + rec.manifest.string());
    m << text << "\n";
  }

  std::vector<ReportRow> rows;
  if (c.command == "sample") {
    const ConfigurationMeta meta{c.seed, c.model->id()};
    std::vector<double> accept;
    for (std::size_t k = 0; k < c.chains; ++k) {
      const fs::path p = c.out_dir / ("samples-chain" + std::to_string(k) + ".jsonl");
      std::ofstream out(p);
      if (!out) throw ConfigError("cannot write samples " + p.string());
      Rng rng(c.seed, k);
      std::size_t count = 0;
      const auto res = run_chain(*c.model, c.window, c.z, c.marks, c.boundary, c.chain, rng,
                                 [&](const Configuration& g, const Energy&, std::size_t) {
                                   write_jsonl(out, g, meta);
                                   ++count;
                                 });
      rec.samples.push_back(p);
      const auto& st = res.stats;
      const auto rate = [](const MoveStats& m) {
        return m.proposed ? static_cast<double>(m.accepted) / static_cast<double>(m.proposed) : 0.0;
      };
      const double chain_id = static_cast<double>(k);
      rows.push_back({"samples", static_cast<double>(count), 0.0, chain_id});
      rows.push_back({"accept_birth", rate(st.birth), 0.0, chain_id});
      rows.push_back({"accept_death", rate(st.death), 0.0, chain_id});
      rows.push_back({"accept_move", rate(st.move), 0.0, chain_id});
      rows.push_back({"accept_remark", rate(st.remark), 0.0, chain_id});
      rows.push_back({"max_energy_drift", st.max_drift, 0.0, chain_id});
    }
  } else if (c.command == "entropy") {
    rows = run_entropy(c);
  } else if (c.command == "audit") {
    rows = run_audit(c);
  } else if (c.command == "dlr") {
    rows = run_dlr(c);
  } else if (c.command == "compat") {
    rows = run_compat(c);
  } else if (c.command == "diffusion") {
    rows = run_diffusion(c);
  }

  const fs::path report = c.out_dir / (c.command + ".csv");
  write_report(report, rows, c.model->id(), c.seed, rec.manifest_hash);
  rec.reports.push_back(report);
  rec.status = "ok";
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

void emit_plot_data(const fs::path& report, const fs::path& out, const std::string& quantity) {
  std::ifstream in(report);
  if (!in) throw ConfigError("cannot open report " + report.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  auto col = [&](const char* name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError(std::string("report is missing column '") + name + "'");
  };
  const std::size_t cq = col("quantity"), ce = col("estimate"), cs = col("stderr"), cn = col("n");
  std::ofstream o(out);
  if (!o) throw ConfigError("cannot write plot data " + out.string());
  o << "x,y,err\n";
  std::string want = quantity;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ConfigError("ragged report row: " + line);
    if (want.empty()) want = cells[cq];
    if (cells[cq] != want) continue;
    o << cells[cn] << ',' << cells[ce] << ',' << cells[cs] << '\n';
  }
}

void write_lj_sweep(const fs::path& out) {
  std::ofstream o(out);
  if (!o) throw ConfigError("cannot write plot data " + out.string());
  o << "x,y,err\n";
  for (int i = 120; i <= 300; ++i) {
    const double u = i / 100.0;
    o << format_double(u) << ',' << format_double(lj_pair(u)) << ",0\n";
  }
}

DiscSystem read_disc_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open disc file " + path.string());
  DiscSystem ds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) throw ConfigError("disc rows must be cx,cy,r: " + line);
    double v[3];
    bool numeric = true;
    for (int i = 0; i < 3; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(cells[static_cast<std::size_t>(i)].c_str(), &end);
      numeric = numeric && end != cells[static_cast<std::size_t>(i)].c_str();
    }
    const bool header = first && !numeric;
    first = false;
    if (header) continue;
    if (!numeric) throw ConfigError("bad disc row: " + line);
    if (!(v[2] >= 0.0) || !std::isfinite(v[2]) || !std::isfinite(v[0]) || !std::isfinite(v[1]))
      throw ConfigError("disc values must be finite with r >= 0: " + line);
    ds.push_back({v[0], v[1], v[2]});
  }
  return ds;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const PreconditionError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  if (dynamic_cast<const json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace gibbs
