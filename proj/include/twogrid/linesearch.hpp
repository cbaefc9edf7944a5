#pragma once

// Step-size selection along a curve alpha -> y(alpha):
//  - the approximate-Wolfe line search (bracket / update / secant^2), and
//  - Armijo backtracking with a zero-step rejection signal.

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace twogrid {

/// One evaluation of phi(alpha) = f(y(alpha)) and its derivative.
struct LinePoint {
  double alpha = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
};

/// Must be pure: equal alpha gives equal results.
using LineFunction = std::function<LinePoint(double alpha)>;

struct WolfeParams {
  double delta = 0.1;
  double sigma = 0.9;
  /// Relative tolerance: the absolute epsilon is eps_ls * (1 + |phi(0)|).
  double eps_ls = 1e-6;
  double gamma = 0.66;
  double rho_expand = 5.0;
  double c_init = 1.0;
  int max_evals = 50;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Thrown internally when the evaluation budget runs out.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("line search evaluation budget exhausted") {}
};

/// Shared state of one approximate-Wolfe search: memoized evaluations, the
/// value bound phi(0) + eps and the evaluation budget.
class WolfeSearch {
 public:
  /// Evaluates phi(0); throws std::invalid_argument unless dphi(0) < 0.
  WolfeSearch(LineFunction phi, WolfeParams params);

  LinePoint at(double alpha);
  const LinePoint& origin() const { return history_.front(); }
  const WolfeParams& params() const { return params_; }
  double value_bound() const { return value_bound_; }
  int evaluations() const { return static_cast<int>(history_.size()); }
  const std::vector<LinePoint>& history() const { return history_; }

  bool satisfies_wolfe(const LinePoint& p) const;
  /// phi(a) <= phi(0) + eps, dphi(a) < 0, dphi(b) >= 0.
  bool opposite_slopes(const Interval& iv);

 private:
  LineFunction phi_;
  WolfeParams params_;
  double value_bound_ = 0.0;
  std::vector<LinePoint> history_;
};

/// Initial interval satisfying the opposite-slope conditions, from probes
/// c, rho c, rho^2 c, ...
Interval bracket(WolfeSearch& ls, double c);

/// Shrinks [a, b] using trial point c; returns [a, b] when c is outside (a, b).
Interval update(WolfeSearch& ls, double a, double b, double c);

/// (a phi'(b) - b phi'(a)) / (phi'(b) - phi'(a)); midpoint when the slopes agree.
double secant(WolfeSearch& ls, double a, double b);

Interval secant2(WolfeSearch& ls, double a, double b);

enum class SearchStatus { Converged, BudgetExhausted, IntervalCollapsed };

struct LineSearchResult {
  SearchStatus status = SearchStatus::Converged;
  LinePoint point;  ///< accepted step, or the best bracketed step on failure
  int evaluations = 0;
  bool ok() const { return status == SearchStatus::Converged; }
};

/// Approximate-Wolfe line search. Returns the accepted step with the lowest
/// phi among all evaluated trial points satisfying the conditions.
LineSearchResult hz_search(const LineFunction& phi, const WolfeParams& params);

struct ArmijoParams {
  double sigma = 1e-4;
  double beta = 0.6;
  double alpha0 = 1.0 / 0.6;
  /// Accepted steps below this are treated as zero and rejected.
  double min_step = 1e-12;

  void validate() const;
};

struct ArmijoResult {
  bool accepted = false;
  LinePoint point;
  int evaluations = 0;
};

/// Largest alpha0 beta^k with phi(alpha) <= phi(0) + sigma alpha phi'(0).
/// `origin` is the already known evaluation at alpha = 0.
ArmijoResult armijo_search(const LineFunction& phi, const LinePoint& origin, const ArmijoParams& params);
ArmijoResult armijo_search(const LineFunction& phi, const ArmijoParams& params);

}  // namespace twogrid
