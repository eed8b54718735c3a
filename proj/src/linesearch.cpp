#include "sgpkit/linesearch.hpp"

#include <algorithm>
#include <stdexcept>

#include "sgpkit/objectives.hpp"

namespace sgp {

double armijo_reference(const std::deque<double>& accepted, int memory) {
  if (accepted.empty())
    throw std::invalid_argument("armijo_reference: empty history");
  const int window =
      std::min<int>(std::max(memory, 1), static_cast<int>(accepted.size()));
  double ref = accepted[accepted.size() - window];
  for (std::size_t i = accepted.size() - window; i < accepted.size(); ++i)
    ref = std::max(ref, accepted[i]);
  return ref;
}

LinesearchResult armijo_backtrack(const std::function<double(double)>& f_along,
                                  double f_ref, double slope,
                                  const LinesearchConfig& cfg) {
  if (slope > 0.0) throw std::runtime_error("not a descent direction");
  LinesearchResult res;
  res.lambda = 1.0;
  res.f_new = f_along(1.0);
  while (res.f_new > f_ref + cfg.gamma * res.lambda * slope &&
         res.backtracks < cfg.max_backtracks) {
    res.lambda *= cfg.sigma;
    res.f_new = f_along(res.lambda);
    ++res.backtracks;
  }
  res.hit_limit = res.f_new > f_ref + cfg.gamma * res.lambda * slope;
  return res;
}

LinesearchResult armijo_search(const Objective& obj, const Vec& x,
                               const Vec& d, const Vec& g, double f_ref,
                               const LinesearchConfig& cfg) {
  if (d.isZero(0.0)) {
    LinesearchResult res;
    res.lambda = 1.0;
    res.f_new = obj.value(x);
    return res;
  }
  const double slope = g.dot(d);
  if (slope >= 0.0) throw std::runtime_error("not a descent direction");
  return armijo_backtrack(
      [&](double t) { return obj.value(x + t * d); }, f_ref, slope, cfg);
}

}  // namespace sgp
