#pragma once

#include <deque>
#include <functional>

#include "sgpkit/image.hpp"

namespace sgp {

class Objective;

struct LinesearchConfig {
  int memory = 1;           // M: reference = max of the last M accepted values
  double gamma = 1e-4;      // sufficient-decrease coefficient
  double sigma = 0.5;       // backtracking factor
  int max_backtracks = 40;
};

struct LinesearchResult {
  double lambda = 1.0;
  double f_new = 0.0;
  int backtracks = 0;
  bool hit_limit = false;  // limit reached; smallest tried lambda returned
};

/// Reference value for the (non)monotone Armijo test: the maximum of the
/// last min(M, available) accepted objective values.
double armijo_reference(const std::deque<double>& accepted, int memory);

/// Backtrack lambda over {1, sigma, sigma^2, ...} until
///   f_along(lambda) <= f_ref + gamma * lambda * slope,
/// where f_along(t) evaluates the objective at x + t*d and slope = g'd.
/// slope > 0 is rejected ("not a descent direction"); the d == 0 case is
/// the caller's short-circuit.
LinesearchResult armijo_backtrack(const std::function<double(double)>& f_along,
                                  double f_ref, double slope,
                                  const LinesearchConfig& cfg);

/// Convenience wrapper evaluating the objective directly.
LinesearchResult armijo_search(const Objective& obj, const Vec& x,
                               const Vec& d, const Vec& g, double f_ref,
                               const LinesearchConfig& cfg);

}  // namespace sgp
