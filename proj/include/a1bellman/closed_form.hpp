#pragma once

#include "a1bellman/params.hpp"

#include <string>
#include <vector>

namespace a1bellman {

/// Index k of the node interval (N^-(k+1), N^-k] that contains x in (0, 1].
/// Computed from the binary exponent of x, so points within one ulp of a
/// node are never misassigned.
struct NodeInterval {
  int k = 0;
  /// x == N^-k exactly.
  bool at_node = false;
};
NodeInterval node_interval(const Params& p, double x);

/// f(x) = B(x, Q, 1): the piecewise-linear interpolation of Q x^epsilon at
/// the nodes x_k = N^-k, where it takes the values Q eta^k. f(0) = 0.
double eval_f(const Params& p, double x);

/// The smooth majorant Q x^epsilon.
double eval_f_smooth(const Params& p, double x);

/// (N eta)^k on the open interval (N^-(k+1), N^-k). Throws NodePointError
/// within relative 1e-12 of a node, where the one-sided slopes differ.
double f_slope(const Params& p, double x);

/// The m = 1 slice of the Bellman function on Omega.
double eval_M(const Params& p, double x, double y);

/// m * M(x, y/m) on the full domain Omega_B.
double eval_B(const Params& p, double x, double y, double m);

/// Which formula eval_M applies at (x, y); used by the CLI.
struct BranchInfo {
  bool upper = false;
  /// Node interval of the rescaled argument x (Q-1)/(y-1); upper branch only.
  NodeInterval interval;
  std::string describe() const;
};
BranchInfo describe_M(const Params& p, double x, double y);

/// Planes of M: on Omega_{k+1} \ Omega_k, M(x, y) = a_k x + b_k (y - 1)
/// with a_k = (N eta)^k and b_k = eta^k.
struct WedgeCoeffs {
  int k = 0;
  double a = 1.0;
  double b = 1.0;
  double plane(double x, double y) const { return a * x + b * (y - 1.0); }
};
WedgeCoeffs wedge_coeffs(const Params& p, int k);

/// Two-plane supporting wedge min(plane_{k-1}, plane_k). The planes cross
/// on the boundary of Omega_k, so this is plane_{k-1} on Omega_k and plane_k
/// outside it. k = 0 is the single plane x + y - 1. M_k >= M on Omega, with
/// equality on Omega_{k+1} \ Omega_{k-1}.
double wedge_Mk(const Params& p, int k, double x, double y);

/// One tabulated value of B.
struct SurfaceSample {
  double x = 0.0;
  double y = 1.0;
  double m = 1.0;
  double value = 0.0;
};

/// Closed-form samples of B on the product grid xs x ys at fixed m; points
/// outside Omega_B are skipped.
std::vector<SurfaceSample> tabulate_B(const Params& p, const std::vector<double>& xs,
                                      const std::vector<double>& ys, double m);

}  // namespace a1bellman
