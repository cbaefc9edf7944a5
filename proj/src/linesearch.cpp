#include "twogrid/linesearch.hpp"

#include <cmath>
#include <string>

namespace twogrid {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

LinePoint sanitize(LinePoint p) {
  // Non-finite values are treated as "too large" so the bisection shrinks.
  if (!std::isfinite(p.phi)) {
    p.phi = std::numeric_limits<double>::infinity();
    p.dphi = -std::numeric_limits<double>::infinity();
  } else if (std::isnan(p.dphi)) {
    p.dphi = -std::numeric_limits<double>::infinity();
  }
  return p;
}

// Bisection loop of the update routine, starting from [abar, bbar] where
// bbar violates the value bound with negative slope.
Interval bisect(WolfeSearch& ls, double abar, double bbar) {
  for (;;) {
    const double d = 0.5 * (abar + bbar);
    if (d <= abar || d >= bbar) return {abar, bbar};
    const LinePoint& pd = ls.at(d);
    if (pd.dphi >= 0.0) return {abar, d};
    if (pd.phi <= ls.value_bound()) {
      abar = d;
    } else {
      bbar = d;
    }
  }
}

}  // namespace

void WolfeParams::validate() const {
  check(delta > 0.0 && delta < 0.5, "wolfe.delta must lie in (0, 1/2)");
  check(sigma >= delta && sigma < 1.0, "wolfe.sigma must lie in [delta, 1)");
  check(eps_ls >= 0.0, "wolfe.eps_ls must be >= 0");
  check(gamma > 0.0 && gamma < 1.0, "wolfe.gamma must lie in (0, 1)");
  check(rho_expand > 1.0, "wolfe.rho_expand must be > 1");
  check(c_init > 0.0, "wolfe.c_init must be > 0");
  check(max_evals >= 2, "wolfe.max_evals must be >= 2");
}

void ArmijoParams::validate() const {
  check(sigma > 0.0 && sigma < 1.0, "armijo.sigma must lie in (0, 1)");
  check(beta > 0.0 && beta < 1.0, "armijo.beta must lie in (0, 1)");
  check(alpha0 > 0.0, "armijo.alpha0 must be > 0");
  check(min_step > 0.0 && min_step < alpha0, "armijo.min_step must lie in (0, alpha0)");
}

WolfeSearch::WolfeSearch(LineFunction phi, WolfeParams params)
    : phi_(std::move(phi)), params_(params) {
  params_.validate();
  LinePoint p0 = sanitize(phi_(0.0));
  p0.alpha = 0.0;
  if (!std::isfinite(p0.phi) || !(p0.dphi < 0.0)) {
    throw std::invalid_argument("line search: dphi(0) must be negative (descent direction)");
  }
  history_.push_back(p0);
  value_bound_ = p0.phi + params_.eps_ls * (1.0 + std::abs(p0.phi));
}

LinePoint WolfeSearch::at(double alpha) {
  for (const auto& p : history_) {
    if (p.alpha == alpha) return p;
  }
  if (evaluations() >= params_.max_evals) throw BudgetExhausted();
  LinePoint p = sanitize(phi_(alpha));
  p.alpha = alpha;
  history_.push_back(p);
  return history_.back();
}

bool WolfeSearch::satisfies_wolfe(const LinePoint& p) const {
  const double d0 = origin().dphi;
  return p.alpha > 0.0 && params_.sigma * d0 <= p.dphi && p.dphi <= (2.0 * params_.delta - 1.0) * d0 &&
         p.phi <= value_bound_;
}

bool WolfeSearch::opposite_slopes(const Interval& iv) {
  const LinePoint pa = at(iv.a);
  const LinePoint pb = at(iv.b);
  return pa.phi <= value_bound_ && pa.dphi < 0.0 && pb.dphi >= 0.0;
}

Interval bracket(WolfeSearch& ls, double c) {
  double last_ok = 0.0;  // c_{-1} := 0
  double ck = c;
  for (;;) {
    const LinePoint& p = ls.at(ck);
    if (p.dphi >= 0.0) return {last_ok, ck};
    if (p.phi > ls.value_bound()) return bisect(ls, 0.0, ck);
    last_ok = ck;
    ck *= ls.params().rho_expand;
  }
}

Interval update(WolfeSearch& ls, double a, double b, double c) {
  if (!(c > a && c < b)) return {a, b};
  const LinePoint& pc = ls.at(c);
  if (pc.dphi >= 0.0) return {a, c};
  if (pc.phi <= ls.value_bound()) return {c, b};
  return bisect(ls, a, c);
}

double secant(WolfeSearch& ls, double a, double b) {
  const double da = ls.at(a).dphi;
  const double db = ls.at(b).dphi;
  if (db == da || !std::isfinite(da) || !std::isfinite(db)) return 0.5 * (a + b);
  return (a * db - b * da) / (db - da);
}

Interval secant2(WolfeSearch& ls, double a, double b) {
  const double c = secant(ls, a, b);
  const Interval AB = update(ls, a, b, c);
  double cbar = 0.0;
  if (c == AB.b) {
    cbar = secant(ls, b, AB.b);
  } else if (c == AB.a) {
    cbar = secant(ls, a, AB.a);
  } else {
    return AB;
  }
  return update(ls, AB.a, AB.b, cbar);
}

LineSearchResult hz_search(const LineFunction& phi, const WolfeParams& params) {
  WolfeSearch ls(phi, params);

  auto best_acceptable = [&]() -> const LinePoint* {
    const LinePoint* best = nullptr;
    for (const auto& p : ls.history()) {
      if (ls.satisfies_wolfe(p) && (best == nullptr || p.phi < best->phi)) best = &p;
    }
    return best;
  };
  auto finish = [&](SearchStatus status, const Interval* iv) {
    LineSearchResult r;
    r.status = status;
    r.evaluations = ls.evaluations();
    if (const LinePoint* p = best_acceptable()) {
      r.status = SearchStatus::Converged;
      r.point = *p;
      return r;
    }
    // Best bracketed step: lowest phi among points below the value bound.
    r.point = ls.origin();
    for (const auto& p : ls.history()) {
      if (p.alpha > 0.0 && p.phi <= ls.value_bound() && p.phi < r.point.phi) r.point = p;
    }
    if (iv != nullptr && r.point.alpha == 0.0 && iv->a > 0.0) r.point = ls.at(iv->a);
    return r;
  };

  Interval iv;
  try {
    iv = bracket(ls, params.c_init);
    if (best_acceptable() != nullptr) return finish(SearchStatus::Converged, &iv);
    for (;;) {
      const double width = iv.b - iv.a;
      Interval next = secant2(ls, iv.a, iv.b);
      if (next.b - next.a > params.gamma * width) {
        next = update(ls, next.a, next.b, 0.5 * (next.a + next.b));
      }
      iv = next;
      if (best_acceptable() != nullptr) return finish(SearchStatus::Converged, &iv);
      if (iv.b - iv.a <= 4.0 * std::numeric_limits<double>::epsilon() * iv.b) {
        return finish(SearchStatus::IntervalCollapsed, &iv);
      }
    }
  } catch (const BudgetExhausted&) {
    return finish(SearchStatus::BudgetExhausted, &iv);
  }
}

ArmijoResult armijo_search(const LineFunction& phi, const LinePoint& origin, const ArmijoParams& params) {
  params.validate();
  if (!(origin.dphi < 0.0)) {
    throw std::invalid_argument("armijo_search: dphi(0) must be negative (descent direction)");
  }
  ArmijoResult r;
  r.point = origin;
  for (double alpha = params.alpha0; alpha >= params.min_step; alpha *= params.beta) {
    const LinePoint p = phi(alpha);
    ++r.evaluations;
    if (std::isfinite(p.phi) && p.phi <= origin.phi + params.sigma * alpha * origin.dphi) {
      r.accepted = true;
      r.point = p;
      r.point.alpha = alpha;
      return r;
    }
  }
  return r;
}

ArmijoResult armijo_search(const LineFunction& phi, const ArmijoParams& params) {
  LinePoint origin = phi(0.0);
  origin.alpha = 0.0;
  ArmijoResult r = armijo_search(phi, origin, params);
  ++r.evaluations;
  return r;
}

}  // namespace twogrid
