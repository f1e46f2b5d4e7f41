#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>

#include <json.hpp>

#include "gibbs/core.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

/// Energy value in R or +infinity. +infinity is absorbing under addition; NaN and
/// -infinity cannot be constructed; infinity - infinity throws.
class Energy {
public:
  Energy() = default;
  explicit Energy(double v);
  static Energy infinite() {
    Energy e;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_infinite() const { return v_ == std::numeric_limits<double>::infinity(); }
  bool is_finite() const { return !is_infinite(); }
  double value() const { return v_; }

  Energy& operator+=(const Energy& o);
  friend Energy operator+(Energy a, const Energy& b) { return a += b; }
  /// a - b; throws NumericalError if b is infinite.
  friend Energy operator-(const Energy& a, const Energy& b);
  /// Scale by beta >= 0 (0 * infinity is infinity: infeasible stays infeasible).
  friend Energy operator*(double beta, const Energy& e);
  friend bool operator==(const Energy& a, const Energy& b) { return a.v_ == b.v_; }

private:
  double v_ = 0.0;
};

/// Read-only view of "the other points": an environment followed by current points,
/// optionally skipping one current point.
struct PointView {
  std::span<const MarkedPoint> env;
  std::span<const MarkedPoint> cur;
  std::ptrdiff_t skip = -1;

  template <class F>
  void for_each(F&& f) const {
    for (const auto& p : env) f(p);
    for (std::size_t i = 0; i < cur.size(); ++i)
      if (static_cast<std::ptrdiff_t>(i) != skip) f(cur[i]);
  }
};

class EnergyModel {
public:
  virtual ~EnergyModel() = default;
  virtual std::string id() const = 0;
  virtual nlohmann::json params() const = 0;
  /// H(gamma); H(empty) = 0.
  virtual Energy energy(const Configuration& gamma) const = 0;
  /// H(others + p) - H(others). Only points within interaction reach of p may contribute.
  virtual Energy delta_add(const PointView& others, const MarkedPoint& p) const = 0;
  /// Points x, y interact only if |x - y| <= pad + |m_x| + |m_y|.
  virtual double interaction_pad() const { return 0.0; }
  /// H >= 0 on every configuration (enables rejection sampling).
  virtual bool nonnegative() const = 0;
  /// H can take the value +infinity.
  virtual bool may_be_infinite() const { return false; }
};

/// H = sum of self terms + sum over pairs.
class PairModel : public EnergyModel {
public:
  virtual Energy self(const MarkedPoint& p) const = 0;
  virtual Energy pair(const MarkedPoint& p, const MarkedPoint& q) const = 0;

  Energy energy(const Configuration& gamma) const override;
  Energy delta_add(const PointView& others, const MarkedPoint& p) const override;
};

/// H = 0.
class PoissonModel final : public PairModel {
public:
  std::string id() const override { return "poisson"; }
  nlohmann::json params() const override { return nlohmann::json::object(); }
  bool nonnegative() const override { return true; }
  Energy self(const MarkedPoint&) const override { return {}; }
  Energy pair(const MarkedPoint&, const MarkedPoint&) const override { return {}; }
};

/// alpha1 Area + alpha2 Per + alpha3 chi of the union of grains B(x, |m|) in R^2.
class QuermassModel final : public EnergyModel {
public:
  QuermassModel(double a1, double a2, double a3);
  std::string id() const override { return "quermass"; }
  nlohmann::json params() const override;
  Energy energy(const Configuration& gamma) const override;
  Energy delta_add(const PointView& others, const MarkedPoint& p) const override;
  bool nonnegative() const override { return false; }

  double alpha1() const { return a1_; }
  double alpha2() const { return a2_; }
  double alpha3() const { return a3_; }
  double evaluate(const DiscSystem& discs) const;

private:
  double a1_, a2_, a3_;
};

/// +infinity iff two grains overlap (|x - y| < |m_x| + |m_y|).
class HardSphereModel final : public PairModel {
public:
  std::string id() const override { return "hardcore"; }
  nlohmann::json params() const override { return nlohmann::json::object(); }
  bool nonnegative() const override { return true; }
  bool may_be_infinite() const override { return true; }
  Energy self(const MarkedPoint&) const override { return {}; }
  Energy pair(const MarkedPoint& p, const MarkedPoint& q) const override;
};

/// phi(|x - y|) when |x - y| <= |m_x| + |m_y|, with phi >= 0: constant c, or c u^p.
class NonNegPairModel final : public PairModel {
public:
  enum class Kind { constant, power };
  NonNegPairModel(Kind kind, double c, double p = 1.0);
  std::string id() const override { return "nonnegpair"; }
  nlohmann::json params() const override;
  bool nonnegative() const override { return true; }
  Energy self(const MarkedPoint&) const override { return {}; }
  Energy pair(const MarkedPoint& p, const MarkedPoint& q) const override;
  double phi(double u) const;

private:
  Kind kind_;
  double c_, p_;
};

/// phi(u) = 16((1.5/u)^12 - (1.5/u)^6); u > 0.
double lj_pair(double u);

/// Langevin-path marks: Psi(x, m) = -1 - |m|^(5/2) and
/// Phi = (lj(|x1 - x2|) + int_0^1 min(|m1(s) - m2(s)|^2, cap) ds) 1{|x1 - x2| <= a0 + |m1| + |m2|}.
class DiffusionModel final : public PairModel {
public:
  explicit DiffusionModel(double a0 = 1.5, double path_cap = 1e6);
  std::string id() const override { return "diffusion"; }
  nlohmann::json params() const override;
  double interaction_pad() const override { return a0_; }
  bool nonnegative() const override { return false; }
  Energy self(const MarkedPoint& p) const override;
  Energy pair(const MarkedPoint& p, const MarkedPoint& q) const override;
  /// Trapezoid integral of min(|m1(s) - m2(s)|^2, cap) over [0, 1].
  double path_term(const Mark& m1, const Mark& m2) const;

private:
  double a0_, cap_;
};

/// beta * H, used for thermodynamic integration.
class ScaledModel final : public EnergyModel {
public:
  ScaledModel(std::shared_ptr<const EnergyModel> base, double beta);
  std::string id() const override { return base_->id(); }
  nlohmann::json params() const override;
  Energy energy(const Configuration& gamma) const override { return beta_ * base_->energy(gamma); }
  Energy delta_add(const PointView& others, const MarkedPoint& p) const override {
    return beta_ * base_->delta_add(others, p);
  }
  double interaction_pad() const override { return base_->interaction_pad(); }
  bool nonnegative() const override { return base_->nonnegative(); }
  bool may_be_infinite() const override { return base_->may_be_infinite(); }

private:
  std::shared_ptr<const EnergyModel> base_;
  double beta_;
};

/// Model from a JSON block {"id": ..., parameters...}.
std::shared_ptr<const EnergyModel> make_model(const nlohmann::json& j);

/// 2 l_range(t) + 2 mark_sup(gamma_Lambda) + 1.
double interaction_range(const Configuration& gamma, const Window& lambda, int t, int d, double delta);

/// H(inner + env) - H(env) computed by adding the inner points one at a time.
Energy interaction_energy(const EnergyModel& model, std::span<const MarkedPoint> inner,
                          std::span<const MarkedPoint> env);

/// H_Lambda(gamma | xi): xi restricted to the complement of Lambda and truncated to Lambda + B(0, r)
/// with r = interaction_range. Throws PreconditionError if gamma leaves Lambda or xi is not in M^t.
Energy conditional_energy(const EnergyModel& model, const Configuration& gamma, const Configuration& xi,
                          const Window& lambda, int t, double delta);
/// Same without truncation: the whole finite environment outside Lambda is used.
Energy conditional_energy_untruncated(const EnergyModel& model, const Configuration& gamma, const Configuration& xi,
                                      const Window& lambda);

struct AdditivityResult {
  double residual = 0.0;
  bool comparable = true;  // false when an infinite energy makes the gaps undefined
  double scale = 1.0;      // max(1, |energies| entering the gaps): rounding in the residual is relative to this
};

/// (H_Delta - H_Lambda)(gamma) - (H_Delta - H_Lambda)(gamma_alt) for two fillings of Lambda
/// sharing the exterior xi (points outside Lambda, inside or outside Delta).
AdditivityResult additivity_check(const EnergyModel& model, const Configuration& gamma, const Configuration& gamma_alt,
                                  const Configuration& xi, const Window& lambda, const Window& delta_window);

struct StabilityReport {
  double c_hat = -std::numeric_limits<double>::infinity();
  std::size_t trials = 0;
  std::size_t used = 0;      // finite energy, non-empty
  std::size_t infinite = 0;  // trials with H = +infinity
};

using ConfigGenerator = std::function<Configuration(Rng&)>;

/// max over trials of -H / <gamma, 1 + |m|^(d+delta)>; with two_sided, |H| / <gamma, 1 + |m|^d>.
StabilityReport stability_audit(const EnergyModel& model, const ConfigGenerator& gen, std::size_t n_trials,
                                double delta, Rng& rng, bool two_sided = false);
/// Fold one more configuration into a report (used to include chain samples in the constant).
void stability_update(StabilityReport& rep, const EnergyModel& model, const Configuration& gamma, double delta,
                      bool two_sided = false);

/// max over trials of -H_Lambda(gamma | xi) / <gamma, 1 + |m|^(d+delta)> for inner configurations
/// gamma in Lambda and tempered environments xi.
StabilityReport local_stability_audit(const EnergyModel& model, const Window& lambda, int t, const ConfigGenerator& inner,
                                      const ConfigGenerator& env, std::size_t n_trials, double delta, Rng& rng);

/// Bound on the number of points of a configuration in M^t inside the closed ball B(0, R): t ceil(R)^d.
double tempered_count_bound(int t, double radius, int d);

struct LjFloor {
  double u_min = 0.0;
  double phi_min = 0.0;
};
/// Minimiser of lj_pair located as the root of its derivative.
LjFloor lj_floor();

}  // namespace gibbs
