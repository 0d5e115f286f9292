#pragma once

// Independent checks of the closed form: seeded samplers for the Main
// Inequality and its wedge refinement, property suites, the weak-type
// corollary, and an exhaustive supremum oracle over small dyadic trees.

#include "a1bellman/dyadic.hpp"
#include "a1bellman/numeric.hpp"
#include "a1bellman/params.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace a1bellman {

inline constexpr double kDefaultTol = 1e-9;

/// Outcome of one suite. Slack is LHS - RHS of the checked inequality, so
/// the suite passes iff the smallest slack seen is >= -tol.
struct CheckReport {
  std::string suite;
  long long samples = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  /// Coordinates of the sample attaining worst_slack, in a fixed order.
  std::vector<std::pair<std::string, double>> worst_witness;
  double tol = kDefaultTol;
  bool passed = true;
  /// False when the suite's preconditions do not hold (for example a
  /// weak-type exponent above the endpoint); then passed is false as well.
  bool applicable = true;
  /// Side statistics: rejections, strata sizes, which constraint binds.
  std::map<std::string, long long> counters;
  std::string note;

  /// Recomputes passed from worst_slack, tol, and applicable.
  void finalize();
};

// ---------------------------------------------------------------------------
// Main Inequality, reduced two-point form:
//   M(x, y) >= (N-1)/N M(xt, yt) + (yh / (NQ)) M(xh, Q)
// with xh = N x - (N-1) xt and yh = N y - (N-1) yt.

struct MainTuple {
  double x = 0, y = 1, xt = 0, yt = 1;
  double x_hat(const Params& p) const { return p.N * x - (p.N - 1) * xt; }
  double y_hat(const Params& p) const { return p.N * y - (p.N - 1) * yt; }
};

enum class MainRejection { None, OutsideOmega, XHatRange, YHatBelowQ, Order };

/// Both (x, y) and (xt, yt) in Omega, xh in [0, 1], yh >= Q, and xt <= x.
/// xt <= x implies xh >= 0; both are enforced.
MainRejection main_tuple_admissibility(const Params& p, const MainTuple& t);
double main_inequality_M_slack(const Params& p, const MainTuple& t);

CheckReport check_main_inequality_M(const Params& p, long long n_samples, std::uint64_t seed,
                                    double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Main Inequality for B on N children:
//   B(<x_i>, <y_i>, min m_i) >= <B(x_i, y_i, m_i)>.

bool b_tuple_admissible(const Params& p, const std::vector<DomainPoint>& children);
double main_inequality_B_slack(const Params& p, const std::vector<DomainPoint>& children);

/// Half the samples draw general m_i with min m_i = 1; a quarter use the
/// reduction m_i = max(1, y_i/Q) with exactly N-k children at y_i >= Q,
/// stratified over k = 1..N-1; the last quarter is the corner-step
/// configuration, where equality holds.
CheckReport check_main_inequality_B(const Params& p, long long n_samples, std::uint64_t seed,
                                    double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Wedge refinement: M_k(x, y) >= (N-1)/N M_k(xt, yt) + (1/N)(yh/Q) M_k(xh, Q)
// for (x, y) in the region where M coincides with plane k, i.e. Omega_1 for
// k = 0 and Omega_{k+1} \ Omega_k for k >= 1.

bool wedge_region(const Params& p, int k, double x, double y);
bool wedge_tuple_admissible(const Params& p, int k, const MainTuple& t);
double wedge_inequality_slack(const Params& p, int k, const MainTuple& t);

/// Samples are stratified over k = 0..k_max.
CheckReport check_wedge_inequality(const Params& p, int k_max, long long n_samples,
                                   std::uint64_t seed, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Property suites on the closed form.

CheckReport check_concavity(const Params& p, long long n_samples, std::uint64_t seed,
                            double tol = kDefaultTol);
CheckReport check_t_monotonicity(const Params& p, long long n_samples, std::uint64_t seed,
                                 double tol = kDefaultTol);
/// f <= Q x^epsilon on a uniform grid, and f = Q x^epsilon (relative) at the
/// nodes N^-k, k <= 40. Grid points where the two touch are counted,
/// separately for those near a node and those away from every node.
CheckReport check_smooth_bound(const Params& p, long long n_grid, double tol = kDefaultTol);
/// Both branches of M agree on y = 1 + (Q-1)x.
CheckReport check_branch_continuity(const Params& p, long long n_points,
                                    double tol = kDefaultTol);
/// B(x, l y, l m) = l B(x, y, m), measured as relative error.
CheckReport check_homogeneity(const Params& p, long long n_samples, std::uint64_t seed,
                              double tol = 1e-12);
/// M_k >= M on an n_side x n_side grid of Omega for k = 1..k_max (x is
/// log-spaced per k so both planes of the wedge are hit).
CheckReport check_wedge_domination(const Params& p, int k_max, long long n_side,
                                   double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Weak-type corollary: for ess inf w = 1 and p <= p_max([w]),
//   sup_l l |{w > l}|^(1/p) <= integral of w.

CheckReport check_weak_type(const DyadicWeight& w, double p_exp, double tol = kDefaultTol);

/// p_max evaluated at the weight's own characteristic (infinite when the
/// weight is constant).
double weak_type_endpoint(const DyadicWeight& w);

// ---------------------------------------------------------------------------
// Exhaustive oracle.

struct OracleBucket {
  double x = 0;
  long long y_key = 0;  // round((y - 1) / y_width)
  double y_mid = 1;
  double m = 1;
  double value = 0;
  /// Exact statistics of the witness attaining `value`.
  double witness_y = 1;
  int witness_id = 0;
};

struct OracleWitness {
  DyadicWeight w;
  DyadicSet E;
  WeightStats<double> stats;
};

struct OracleTable {
  Params params;
  int depth = 0;
  std::vector<double> grid;
  Rational x_step;
  double y_width = 0;
  std::vector<OracleBucket> buckets;  // sorted by (x, y_key)
  std::vector<OracleWitness> witnesses;
  long long weights_enumerated = 0;
  long long weights_admissible = 0;
};

/// Default value grid: {1} and 1 + j (Q-1) N / (G-1) for j = 1..G-1, plus
/// every leaf value of build_corner(k) for k < depth, so the corner
/// extremizers are representable.
std::vector<double> default_oracle_grid(const Params& p, int grid_size, int depth);

/// Largest enumeration the oracle accepts (number of root-level child
/// combinations).
inline constexpr double kOracleMaxCombinations = 2e8;

/// Enumerates every weight on the full tree of the given depth with leaf
/// values from `grid` (which must contain 1, all values >= 1), up to
/// permutation of siblings, which changes no statistic. Weights with
/// [w] > Q + 1e-9 or ess inf != 1 are discarded. For x = j * x_step the best
/// set is the union of the j x_step N^depth heaviest leaves. Buckets are keyed
/// by (x, y rounded to a grid of width 0.05 (Q-1)).
OracleTable brute_force_oracle(const Params& p, int depth, const std::vector<double>& grid,
                               const Rational& x_step);

/// Upper direction: every bucket value <= B(x, witness y, 1) + tol, and each
/// witness reproduces its bucket. Lower direction: at corner buckets
/// (N^-k, Q) reachable at this depth the value is >= Q eta^k - tol.
CheckReport oracle_vs_closed_form(const OracleTable& table, const Params& p,
                                  double tol = kDefaultTol);

}  // namespace a1bellman
