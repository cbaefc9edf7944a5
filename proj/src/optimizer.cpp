#include "twogrid/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace twogrid {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Counts fine-level objective/gradient evaluations (always computed together).
class FineOracle {
 public:
  explicit FineOracle(const Problem& pb) : pb_(pb) {}
  ObjectiveEval operator()(const BoxPoint& y) {
    ++evals_;
    return objective(pb_, y);
  }
  long evals() const { return evals_; }

 private:
  const Problem& pb_;
  long evals_ = 0;
};

// Memo of the points visited by a line function, so the accepted point and
// its gradient are reused instead of being evaluated again.
struct CurvePoint {
  double alpha;
  BoxPoint y;
  ObjectiveEval eval;
};

class Curve {
 public:
  using Map = std::function<BoxPoint(double)>;
  using Slope = std::function<double(double, const BoxPoint&, const Vector&)>;
  using Eval = std::function<ObjectiveEval(const BoxPoint&)>;

  Curve(Map map, Slope slope, Eval eval) : map_(std::move(map)), slope_(std::move(slope)), eval_(std::move(eval)) {}

  void seed(const BoxPoint& y, const ObjectiveEval& e) { points_.push_back({0.0, y, e}); }

  LinePoint operator()(double alpha) {
    const CurvePoint& p = lookup(alpha);
    return {alpha, p.eval.value, slope_(alpha, p.y, p.eval.eucl_grad)};
  }

  const CurvePoint& lookup(double alpha) {
    for (const auto& p : points_) {
      if (p.alpha == alpha) return p;
    }
    BoxPoint y = map_(alpha);
    ObjectiveEval e = eval_(y);
    points_.push_back({alpha, std::move(y), std::move(e)});
    return points_.back();
  }

  LineFunction as_function() {
    return [this](double a) { return (*this)(a); };
  }

 private:
  Map map_;
  Slope slope_;
  Eval eval_;
  std::vector<CurvePoint> points_;
};

// Curve alpha -> exp_y(alpha v) with phi'(alpha) = <d f(y_alpha), dexp_y(alpha v) v>.
Curve retraction_curve(const BoxPoint& y, const Tangent& v, Curve::Eval eval) {
  const Vector var0 = y.variance();
  return Curve([y, v](double a) { return exp_map(y, (a * v).eval()); },
               [var0, v](double, const BoxPoint& ya, const Vector& g) {
                 const Vector scaled = (ya.variance().array() / var0.array() * v.array()).matrix();
                 return g.dot(scaled);
               },
               std::move(eval));
}

struct StepOutcome {
  bool ok = false;
  BoxPoint y;
  ObjectiveEval eval;
};

// hz_search along the curve, Armijo as fallback.
StepOutcome search_curve(Curve& curve, const LinePoint& origin, const SolverConfig& cfg) {
  StepOutcome out;
  try {
    const LineSearchResult hz = hz_search(curve.as_function(), cfg.wolfe);
    if (hz.ok() && hz.point.alpha > 0.0) {
      const CurvePoint& p = curve.lookup(hz.point.alpha);
      return {true, p.y, p.eval};
    }
  } catch (const std::invalid_argument&) {
    // Not a descent direction numerically; Armijo rejects it as well.
  }
  const ArmijoResult arm = armijo_search(curve.as_function(), origin, cfg.armijo);
  if (arm.accepted) {
    const CurvePoint& p = curve.lookup(arm.point.alpha);
    return {true, p.y, p.eval};
  }
  return out;
}

// Projected Armijo search: y(alpha) = clip(y - alpha g), accepted when
// f(y(alpha)) <= f(y) + sigma <g, y(alpha) - y>.
template <class Eval>
StepOutcome projected_armijo(const BoxPoint& y, double fy, const Vector& g, const ArmijoParams& params, Eval&& eval) {
  for (double alpha = params.alpha0; alpha >= params.min_step; alpha *= params.beta) {
    BoxPoint trial(y.values() - alpha * g);
    const Vector step = trial.values() - y.values();
    const double decrease = g.dot(step);
    if (!(decrease < 0.0)) return {};
    ObjectiveEval e = eval(trial);
    if (std::isfinite(e.value) && e.value <= fy + params.sigma * decrease) return {true, std::move(trial), std::move(e)};
  }
  return {};
}

double distance(const BoxPoint& a, const std::optional<BoxPoint>& b) {
  return (a.values() - b->values()).norm();
}

class Recorder {
 public:
  Recorder(const SolverConfig& cfg, const FineOracle& oracle)
      : cfg_(cfg), oracle_(oracle), start_(std::chrono::steady_clock::now()) {}

  void add(RunResult& r, int iter, Level level, const BoxPoint& y, const ObjectiveEval& e) const {
    IterateRecord rec;
    rec.iter = iter;
    rec.level = level;
    rec.f = e.value;
    rec.gnorm = std::sqrt((e.eucl_grad.array().square() * y.variance().array()).sum());
    rec.fine_grad_evals = oracle_.evals();
    if (cfg_.record_wall_clock) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    r.trace.push_back(rec);
  }

 private:
  const SolverConfig& cfg_;
  const FineOracle& oracle_;
  std::chrono::steady_clock::time_point start_;
};

// One Riemannian steepest-descent step.
StepOutcome riemannian_fine_step(const BoxPoint& y, const ObjectiveEval& e, FineOracle& oracle,
                                 const SolverConfig& cfg) {
  const Tangent g = riem_grad(y, e.eucl_grad);
  const Tangent v = -g;
  Curve curve = retraction_curve(y, v, [&oracle](const BoxPoint& p) { return oracle(p); });
  curve.seed(y, e);
  const LinePoint origin{0.0, e.value, e.eucl_grad.dot(v)};
  if (!(origin.dphi < 0.0)) return {};
  return search_curve(curve, origin, cfg);
}

StepOutcome projected_fine_step(const BoxPoint& y, const ObjectiveEval& e, FineOracle& oracle,
                                const SolverConfig& cfg) {
  return projected_armijo(y, e.value, e.eucl_grad, cfg.armijo, [&oracle](const BoxPoint& p) { return oracle(p); });
}

using FineStep = StepOutcome (*)(const BoxPoint&, const ObjectiveEval&, FineOracle&, const SolverConfig&);

// Shared outer loop. `coarse` attempts a coarse correction and returns
// a successful outcome when it was taken.
template <class CoarseFn>
RunResult drive(const Problem& pb, const SolverConfig& cfg, FineStep fine_step, CoarseFn&& coarse) {
  cfg.validate();
  FineOracle oracle(pb);
  Recorder rec(cfg, oracle);
  RunResult result;
  BoxPoint y = BoxPoint::constant(pb.num_pixels(), cfg.init_value);
  ObjectiveEval e = oracle(y);
  rec.add(result, 0, Level::Init, y, e);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    if (result.trace.back().gnorm <= cfg.gtol) {
      result.status = RunStatus::Converged;
      break;
    }
    Level level = Level::Coarse;
    StepOutcome step = coarse(y, e, oracle, result);
    if (!step.ok) {
      level = Level::Fine;
      step = fine_step(y, e, oracle, cfg);
    }
    if (!step.ok) {
      result.status = RunStatus::Stalled;
      break;
    }
    y = std::move(step.y);
    e = std::move(step.eval);
    rec.add(result, k, level, y, e);
  }
  if (result.status == RunStatus::MaxIterations && result.trace.back().gnorm <= cfg.gtol) {
    result.status = RunStatus::Converged;
  }
  result.solution = std::move(y);
  return result;
}

}  // namespace

std::string_view to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::SingleRG: return "single_rg";
    case SolverMode::TwoLevelRG: return "two_level_rg";
    case SolverMode::TwoLevelEuclidean: return "two_level_euclidean";
    case SolverMode::SinglePG: return "single_pg";
  }
  return "?";
}

SolverMode parse_mode(std::string_view name) {
  for (auto m : {SolverMode::SingleRG, SolverMode::TwoLevelRG, SolverMode::TwoLevelEuclidean, SolverMode::SinglePG}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown solver mode '" + std::string(name) + "'");
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Init: return "init";
    case Level::Fine: return "fine";
    case Level::Coarse: return "coarse";
  }
  return "?";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::MaxIterations: return "max_iter";
    case RunStatus::Converged: return "converged";
    case RunStatus::Stalled: return "stalled";
  }
  return "?";
}

void SolverConfig::validate() const {
  check(eta > 0.0 && eta < 1.0, "solver.eta must lie in (0, 1)");
  check(eps_dist > 0.0 && eps_dist < 1.0, "solver.eps_dist must lie in (0, 1)");
  check(max_iter >= 1, "solver.max_iter must be >= 1");
  check(coarse_iters >= 1, "solver.coarse_iters must be >= 1");
  check(gtol >= 0.0, "solver.gtol must be >= 0");
  check(init_value > 0.0 && init_value < 1.0, "solver.init_value must lie in (0, 1)");
  check(feasible_fraction > 0.0 && feasible_fraction < 1.0, "solver.feasible_fraction must lie in (0, 1)");
  wolfe.validate();
  armijo.validate();
}

// ---------------------------------------------------------------------------
// Coarse models

CoarseModel::CoarseModel(CoarseKind kind, const Problem& coarse, BoxPoint x0)
    : kind_(kind), coarse_(coarse), x0_(std::move(x0)) {
  anchor_ = coarse_.A() * x0_.values();
  ObjectiveEval e = objective_with_data(coarse_, anchor_, x0_);
  f_x0_ = e.value;
  grad_x0_ = std::move(e.eucl_grad);
}

CoarseModel CoarseModel::geometric(const Problem& coarse, const GridHierarchy& h, const BoxPoint& y0,
                                   const Tangent& fine_riem_grad) {
  check(coarse.shape() == h.coarse_shape(), "CoarseModel: coarse problem does not match hierarchy");
  CoarseModel cm(CoarseKind::Geometric, coarse, restrict_point(h, y0));
  cm.fine_grad_snapshot_ = fine_riem_grad;
  cm.restricted_grad_ = restrict_tangent(h, y0, fine_riem_grad);
  cm.kappa_ = riem_grad(cm.x0_, cm.grad_x0_) - cm.restricted_grad_;
  return cm;
}

CoarseModel CoarseModel::euclidean(const Problem& coarse, const GridHierarchy& h, const BoxPoint& y0,
                                   const Vector& fine_grad) {
  check(coarse.shape() == h.coarse_shape(), "CoarseModel: coarse problem does not match hierarchy");
  CoarseModel cm(CoarseKind::Euclidean, coarse, restrict_point(h, y0));
  cm.fine_grad_snapshot_ = fine_grad;
  cm.restricted_grad_ = interp_transpose(h, fine_grad);
  cm.kappa_ = cm.grad_x0_ - cm.restricted_grad_;
  return cm;
}

ObjectiveEval CoarseModel::coarse_objective(const BoxPoint& x) const {
  return objective_with_data(coarse_, anchor_, x);
}

PsiEval psi_euclidean(const CoarseModel& cm, const BoxPoint& x) {
  check(cm.kind() == CoarseKind::Euclidean, "psi_euclidean: model is geometric");
  ObjectiveEval e = cm.coarse_objective(x);
  PsiEval out;
  out.value = e.value - (x.values() - cm.x0().values()).dot(cm.kappa());
  out.grad = e.eucl_grad - cm.kappa();
  return out;
}

PsiEval psi_geometric(const CoarseModel& cm, const BoxPoint& x) {
  check(cm.kind() == CoarseKind::Geometric, "psi_geometric: model is Euclidean");
  ObjectiveEval e = cm.coarse_objective(x);
  PsiEval out;
  out.value = e.value - inner(cm.x0(), exp_inv(cm.x0(), x), cm.kappa());
  out.grad = riem_grad(x, e.eucl_grad) - cm.kappa();
  return out;
}

PsiEval psi(const CoarseModel& cm, const BoxPoint& x) {
  return cm.kind() == CoarseKind::Geometric ? psi_geometric(cm, x) : psi_euclidean(cm, x);
}

bool coarse_condition(double restricted_norm, double fine_norm, std::optional<double> dist, double eta,
                      double eps_dist) {
  if (!(fine_norm > 0.0)) return false;
  if (!(restricted_norm >= eta * fine_norm)) return false;
  return !dist.has_value() || *dist >= eps_dist;
}

bool coarse_condition_geometric(const GridHierarchy& h, const BoxPoint& y0, const Tangent& fine_riem_grad,
                                const std::optional<BoxPoint>& last, double eta, double eps_dist) {
  const BoxPoint x0 = restrict_point(h, y0);
  const double restricted = norm(x0, restrict_tangent(h, y0, fine_riem_grad));
  const double fine = norm(y0, fine_riem_grad);
  const std::optional<double> dist = last ? std::optional<double>(distance(y0, last)) : std::nullopt;
  return coarse_condition(restricted, fine, dist, eta, eps_dist);
}

bool coarse_condition_euclidean(const GridHierarchy& h, const BoxPoint& y0, const Vector& fine_grad,
                                const std::optional<BoxPoint>& last, double eta, double eps_dist) {
  const double restricted = interp_transpose(h, fine_grad).norm();
  const std::optional<double> dist = last ? std::optional<double>(distance(y0, last)) : std::nullopt;
  return coarse_condition(restricted, fine_grad.norm(), dist, eta, eps_dist);
}

double certificate_gap(const CoarseModel& cm, const BoxPoint& x) {
  const double fx = cm.coarse_objective(x).value;
  const Vector u = cm.kind() == CoarseKind::Geometric ? exp_inv(cm.x0(), x) : Vector(x.values() - cm.x0().values());
  return fx - cm.f_x0() - u.dot(cm.grad_x0());
}

bool descent_certificate(const CoarseModel& cm, const BoxPoint& x) { return certificate_gap(cm, x) >= 0.0; }

CoarseStepResult coarse_step(const CoarseModel& cm, const SolverConfig& cfg) {
  CoarseStepResult out;
  BoxPoint x = cm.x0();
  PsiEval pe = psi(cm, x);
  out.evaluations = 1;
  auto eval_psi = [&cm, &out](const BoxPoint& p) {
    ++out.evaluations;
    PsiEval q = psi(cm, p);
    ObjectiveEval e;
    e.value = q.value;
    // The Riemannian gradient of the geometric model is converted to the
    // Euclidean one, which is what the curve slopes expect.
    e.eucl_grad = cm.kind() == CoarseKind::Geometric ? Vector(q.grad.array() / p.variance().array()) : q.grad;
    return e;
  };
  for (int it = 0; it < cfg.coarse_iters; ++it) {
    StepOutcome step;
    if (cm.kind() == CoarseKind::Geometric) {
      const double gg = inner(x, pe.grad, pe.grad);
      if (!(gg > 0.0)) break;
      const Tangent v = -pe.grad;
      Curve curve = retraction_curve(x, v, eval_psi);
      ObjectiveEval e0;
      e0.value = pe.value;
      e0.eucl_grad = pe.grad.array() / x.variance().array();
      curve.seed(x, e0);
      const ArmijoResult arm = armijo_search(curve.as_function(), {0.0, pe.value, -gg}, cfg.armijo);
      if (arm.accepted) {
        const CurvePoint& p = curve.lookup(arm.point.alpha);
        step = {true, p.y, p.eval};
      }
    } else {
      if (!(pe.grad.squaredNorm() > 0.0)) break;
      step = projected_armijo(x, pe.value, pe.grad, cfg.armijo, eval_psi);
    }
    if (!step.ok) break;
    x = std::move(step.y);
    pe.value = step.eval.value;
    pe.grad = cm.kind() == CoarseKind::Geometric ? Vector(step.eval.eucl_grad.array() * x.variance().array())
                                                 : step.eval.eucl_grad;
    ++out.iterations;
  }
  out.psi = pe.value;
  out.accepted = out.iterations > 0 && pe.value < cm.f_x0();
  out.x = std::move(x);
  return out;
}

// ---------------------------------------------------------------------------
// Drivers

RunResult run_single_level(const Problem& pb, const SolverConfig& cfg) {
  return drive(pb, cfg, &riemannian_fine_step,
               [](const BoxPoint&, const ObjectiveEval&, FineOracle&, RunResult&) { return StepOutcome{}; });
}

RunResult run_projected_gradient(const Problem& pb, const SolverConfig& cfg) {
  return drive(pb, cfg, &projected_fine_step,
               [](const BoxPoint&, const ObjectiveEval&, FineOracle&, RunResult&) { return StepOutcome{}; });
}

RunResult run_two_level_geometric(const Problem& pb, const GridHierarchy& h, const SolverConfig& cfg,
                                  const CoarseObserver& observer) {
  check(pb.shape() == h.fine_shape(), "run_two_level_geometric: hierarchy does not match problem");
  std::optional<Problem> coarse_pb;
  if (cfg.coarse_enabled) coarse_pb = eval_at_level(pb, h);
  std::optional<BoxPoint> last;
  auto coarse = [&](const BoxPoint& y, const ObjectiveEval& e, FineOracle& oracle, RunResult& result) {
    if (!coarse_pb) return StepOutcome{};
    const Tangent g = riem_grad(y, e.eucl_grad);
    if (!coarse_condition_geometric(h, y, g, last, cfg.eta, cfg.eps_dist)) return StepOutcome{};
    last = y;
    ++result.coarse_attempts;
    const CoarseModel cm = CoarseModel::geometric(*coarse_pb, h, y, g);
    const CoarseStepResult cs = coarse_step(cm, cfg);
    CoarseAttempt attempt{y, e.eucl_grad, cs.x, cs.accepted, false, {}, 0.0, false};
    StepOutcome out;
    if (cs.accepted && descent_certificate(cm, cs.x)) {
      attempt.certified = true;
      attempt.direction = dprolong(h, cm.x0(), exp_inv(cm.x0(), cs.x));
      attempt.fine_slope = e.eucl_grad.dot(attempt.direction);
      if (attempt.fine_slope < 0.0) {
        Curve curve = retraction_curve(y, attempt.direction, [&oracle](const BoxPoint& p) { return oracle(p); });
        curve.seed(y, e);
        out = search_curve(curve, {0.0, e.value, attempt.fine_slope}, cfg);
      }
    }
    attempt.used = out.ok;
    if (out.ok) ++result.coarse_accepted;
    if (observer) observer(attempt);
    return out;
  };
  return drive(pb, cfg, &riemannian_fine_step, coarse);
}

RunResult run_two_level_euclidean(const Problem& pb, const GridHierarchy& h, const SolverConfig& cfg,
                                  const CoarseObserver& observer) {
  check(pb.shape() == h.fine_shape(), "run_two_level_euclidean: hierarchy does not match problem");
  std::optional<Problem> coarse_pb;
  if (cfg.coarse_enabled) coarse_pb = eval_at_level(pb, h);
  std::optional<BoxPoint> last;
  auto coarse = [&](const BoxPoint& y, const ObjectiveEval& e, FineOracle& oracle, RunResult& result) {
    if (!coarse_pb) return StepOutcome{};
    if (!coarse_condition_euclidean(h, y, e.eucl_grad, last, cfg.eta, cfg.eps_dist)) return StepOutcome{};
    last = y;
    ++result.coarse_attempts;
    const CoarseModel cm = CoarseModel::euclidean(*coarse_pb, h, y, e.eucl_grad);
    const CoarseStepResult cs = coarse_step(cm, cfg);
    CoarseAttempt attempt{y, e.eucl_grad, cs.x, cs.accepted, false, {}, 0.0, false};
    StepOutcome out;
    if (cs.accepted) {
      attempt.certified = true;
      attempt.direction = interp_apply(h, cs.x.values() - cm.x0().values());
      attempt.fine_slope = e.eucl_grad.dot(attempt.direction);
      if (attempt.fine_slope < 0.0) {
        const Vector& d = attempt.direction;
        // Largest step keeping y + alpha d inside [eps, 1 - eps].
        double alpha_max = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
          if (d[i] > 0.0) alpha_max = std::min(alpha_max, (1.0 - kEpsClip - y[i]) / d[i]);
          if (d[i] < 0.0) alpha_max = std::min(alpha_max, (kEpsClip - y[i]) / d[i]);
        }
        const double cap = cfg.feasible_fraction * alpha_max;
        ArmijoParams params = cfg.armijo;
        params.alpha0 = std::min(params.alpha0, cap);
        if (params.alpha0 > params.min_step) {
          Curve curve([&y, &d](double a) { return BoxPoint(y.values() + a * d); },
                      [&d](double, const BoxPoint&, const Vector& g) { return g.dot(d); },
                      [&oracle](const BoxPoint& p) { return oracle(p); });
          curve.seed(y, e);
          const ArmijoResult arm = armijo_search(curve.as_function(), {0.0, e.value, attempt.fine_slope}, params);
          if (arm.accepted) {
            const CurvePoint& p = curve.lookup(arm.point.alpha);
            out = {true, p.y, p.eval};
          }
        }
      }
    }
    attempt.used = out.ok;
    if (out.ok) ++result.coarse_accepted;
    if (observer) observer(attempt);
    return out;
  };
  return drive(pb, cfg, &projected_fine_step, coarse);
}

RunResult solve(const Problem& pb, const SolverConfig& cfg) {
  switch (cfg.mode) {
    case SolverMode::SingleRG: return run_single_level(pb, cfg);
    case SolverMode::SinglePG: return run_projected_gradient(pb, cfg);
    case SolverMode::TwoLevelRG: return run_two_level_geometric(pb, GridHierarchy(pb.shape()), cfg);
    case SolverMode::TwoLevelEuclidean: return run_two_level_euclidean(pb, GridHierarchy(pb.shape()), cfg);
  }
  throw std::logic_error("solve: unknown mode");
}

}  // namespace twogrid
