#include "a1bellman/errors.hpp"
#include "a1bellman/verify.hpp"

#include <cmath>
#include <limits>

namespace a1bellman {

double weak_type_endpoint(const DyadicWeight& w) {
  const double c = a1_characteristic(w);
  if (c <= 1.0) return std::numeric_limits<double>::infinity();
  const int n = w.fanout();
  return std::log(static_cast<double>(n)) / std::log(n - (n - 1) / c);
}

CheckReport check_weak_type(const DyadicWeight& w, double p_exp, double tol) {
  CheckReport r;
  r.suite = "weak-type";
  r.tol = tol;
  if (!(p_exp >= 1.0)) throw DomainError("weak-type exponent must be >= 1");
  if (!nearly_equal(ess_inf(w), 1.0)) {
    r.applicable = false;
    r.note = "weight is not normalized: ess inf w != 1";
    r.finalize();
    return r;
  }
  const double endpoint = weak_type_endpoint(w);
  if (p_exp > endpoint * (1.0 + 1e-12)) {
    r.applicable = false;
    r.note = "exponent above the endpoint p_max([w]) = " + std::to_string(endpoint);
    r.finalize();
    return r;
  }
  // lambda |{w > lambda}|^(1/p) increases as lambda rises to each leaf value
  // v, where the level set is {w >= v}; the supremum is attained there.
  const auto dist = value_distribution(w);
  double tail = 0.0;
  double best = 0.0;
  double best_level = 0.0;
  double best_mass = 0.0;
  for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
    tail += it->second;
    const double cand = it->first * std::pow(tail, 1.0 / p_exp);
    if (cand > best) {
      best = cand;
      best_level = it->first;
      best_mass = tail;
    }
  }
  const double integral = average(w);
  r.samples = static_cast<long long>(dist.size());
  r.worst_slack = integral - best;
  r.worst_witness = {{"level", best_level},
                     {"level_set_measure", best_mass},
                     {"weak_norm", best},
                     {"integral", integral},
                     {"p", p_exp},
                     {"p_max", endpoint}};
  r.finalize();
  return r;
}

}  // namespace a1bellman
