#pragma once

// Optimization drivers on the box:
//  - single-level Riemannian gradient descent (RG),
//  - two-level geometric optimization with the coarse model
//      psi(x) = f(x) - <exp_{x0}^{-1}(x), kappa>_{x0},
//      kappa  = grad f(x0) - TR_{y0} grad f(y0),
//  - the Euclidean two-grid scheme with P = BI, R = BI^T,
//  - single-level projected gradient (PG).
//
// Coarse models evaluate the coarse data term against A_c x0, so that
// f_c(x) - f_c(x0) - <x - x0, d f_c(x0)> = D_f(x, x0) and the coarse problem's
// own data vector is never read.

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "twogrid/linesearch.hpp"
#include "twogrid/objective.hpp"
#include "twogrid/transfer.hpp"

namespace twogrid {

enum class SolverMode { SingleRG, TwoLevelRG, TwoLevelEuclidean, SinglePG };

std::string_view to_string(SolverMode mode);
SolverMode parse_mode(std::string_view name);

struct SolverConfig {
  SolverMode mode = SolverMode::TwoLevelRG;
  double eta = 0.49;
  double eps_dist = 1e-3;
  int max_iter = 50;
  int coarse_iters = 5;
  double gtol = 1e-8;
  double init_value = 0.5;
  bool coarse_enabled = true;
  /// Euclidean two-grid: steps are capped at this fraction of the largest
  /// step keeping y0 + alpha d inside the box.
  double feasible_fraction = 0.99;
  /// When false the `seconds` column of traces is written as 0 so that
  /// traces are reproducible byte for byte.
  bool record_wall_clock = false;
  WolfeParams wolfe;
  ArmijoParams armijo;

  void validate() const;
};

enum class Level { Init, Fine, Coarse };
std::string_view to_string(Level level);

struct IterateRecord {
  int iter = 0;
  Level level = Level::Init;
  double f = 0.0;
  double gnorm = 0.0;  ///< ||grad f(y)||_y, Riemannian
  long fine_grad_evals = 0;
  double seconds = 0.0;
};

enum class RunStatus { MaxIterations, Converged, Stalled };
std::string_view to_string(RunStatus status);

struct RunResult {
  std::vector<IterateRecord> trace;
  BoxPoint solution;
  RunStatus status = RunStatus::MaxIterations;
  int coarse_attempts = 0;
  int coarse_accepted = 0;
};

enum class CoarseKind { Geometric, Euclidean };

/// Frozen coarse surrogate at the fine iterate y0.
class CoarseModel {
 public:
  /// `fine_riem_grad` is G_n(y0)^{-1} d f(y0).
  static CoarseModel geometric(const Problem& coarse, const GridHierarchy& h, const BoxPoint& y0,
                               const Tangent& fine_riem_grad);
  /// `fine_grad` is d f(y0); restriction of gradients uses BI^T.
  static CoarseModel euclidean(const Problem& coarse, const GridHierarchy& h, const BoxPoint& y0,
                               const Vector& fine_grad);

  CoarseKind kind() const { return kind_; }
  const Problem& coarse_problem() const { return coarse_; }
  const BoxPoint& x0() const { return x0_; }
  const Vector& kappa() const { return kappa_; }
  const Vector& anchor() const { return anchor_; }
  /// Restricted fine gradient: TR_{y0} grad f(y0) or BI^T d f(y0).
  const Vector& restricted_grad() const { return restricted_grad_; }
  const Tangent& fine_grad_snapshot() const { return fine_grad_snapshot_; }
  double f_x0() const { return f_x0_; }
  /// Euclidean gradient of the coarse objective at x0.
  const Vector& grad_x0() const { return grad_x0_; }

  /// Coarse objective with data A_c x0.
  ObjectiveEval coarse_objective(const BoxPoint& x) const;

 private:
  CoarseModel(CoarseKind kind, const Problem& coarse, BoxPoint x0);

  CoarseKind kind_;
  Problem coarse_;
  BoxPoint x0_;
  Vector anchor_;
  Vector kappa_;
  Vector restricted_grad_;
  Tangent fine_grad_snapshot_;
  Vector grad_x0_;
  double f_x0_ = 0.0;
};

struct PsiEval {
  double value = 0.0;
  Vector grad;  ///< Euclidean gradient (Euclidean model) or Riemannian gradient (geometric model)
};

/// psi(x) = f(x) - <x - x0, kappa>, gradient d f(x) - kappa.
PsiEval psi_euclidean(const CoarseModel& cm, const BoxPoint& x);
/// psi(x) = f(x) - <exp_{x0}^{-1}(x), kappa>_{x0}, Riemannian gradient grad f(x) - kappa.
PsiEval psi_geometric(const CoarseModel& cm, const BoxPoint& x);
PsiEval psi(const CoarseModel& cm, const BoxPoint& x);

/// True iff fine_norm > 0, restricted_norm >= eta * fine_norm and the
/// distance to the last coarse-initiating point (absent: none yet) is >= eps_dist.
bool coarse_condition(double restricted_norm, double fine_norm, std::optional<double> distance, double eta,
                      double eps_dist);

/// Geometric test: ||TR_{y0} g||_{x0} >= eta ||g||_{y0} with g = grad f(y0).
bool coarse_condition_geometric(const GridHierarchy& h, const BoxPoint& y0, const Tangent& fine_riem_grad,
                                const std::optional<BoxPoint>& last, double eta, double eps_dist);
/// Euclidean test: ||BI^T d f(y0)|| >= eta ||d f(y0)||.
bool coarse_condition_euclidean(const GridHierarchy& h, const BoxPoint& y0, const Vector& fine_grad,
                                const std::optional<BoxPoint>& last, double eta, double eps_dist);

/// f(x) - f(x0) - <exp_{x0}^{-1}(x), d f(x0)> (geometric model) or
/// f(x) - f(x0) - <x - x0, d f(x0)> (Euclidean model).
double certificate_gap(const CoarseModel& cm, const BoxPoint& x);
/// certificate_gap(cm, x) >= 0.
bool descent_certificate(const CoarseModel& cm, const BoxPoint& x);

struct CoarseStepResult {
  bool accepted = false;
  BoxPoint x;
  double psi = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Up to cfg.coarse_iters descent iterations on psi from x0 with Armijo steps
/// (Riemannian for the geometric model, projected for the Euclidean one).
/// Accepted iff the last iterate has psi(x) < f(x0).
CoarseStepResult coarse_step(const CoarseModel& cm, const SolverConfig& cfg);

/// Everything known about one coarse correction attempt.
struct CoarseAttempt {
  BoxPoint y0;
  Vector fine_grad;        ///< d f(y0)
  BoxPoint x;              ///< coarse candidate (x0 when rejected early)
  bool candidate = false;  ///< coarse_step produced psi(x) < f(x0)
  bool certified = false;  ///< candidate and certificate passed
  Tangent direction;       ///< prolonged fine direction (empty unless certified)
  double fine_slope = 0.0; ///< <d f(y0), direction>
  bool used = false;       ///< the fine update took the coarse direction
};
using CoarseObserver = std::function<void(const CoarseAttempt&)>;

RunResult run_single_level(const Problem& pb, const SolverConfig& cfg);
RunResult run_projected_gradient(const Problem& pb, const SolverConfig& cfg);
RunResult run_two_level_geometric(const Problem& pb, const GridHierarchy& h, const SolverConfig& cfg,
                                  const CoarseObserver& observer = {});
RunResult run_two_level_euclidean(const Problem& pb, const GridHierarchy& h, const SolverConfig& cfg,
                                  const CoarseObserver& observer = {});

/// Dispatches on cfg.mode.
RunResult solve(const Problem& pb, const SolverConfig& cfg);

}  // namespace twogrid
