#include "aloha/lambertw.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aloha/errors.hpp"

namespace aloha {
namespace {

constexpr double kE = 2.71828182845904523536028747135266;
constexpr int kMaxHalleySteps = 64;

double residual_bound(double z) { return 1e-12 * std::max(1.0, std::abs(z)); }

double residual(double w, double z) { return w * std::exp(w) - z; }

// Expansion about the branch point in s = +/- sqrt(2 (e z + 1)); positive s
// gives the principal branch, negative s the minus-one branch.
double branch_point_seed(double z, double sign) {
  const double s = sign * std::sqrt(std::max(0.0, 2.0 * (kE * z + 1.0)));
  return -1.0 + s * (1.0 + s * (-1.0 / 3.0 + s * (11.0 / 72.0 + s * (-43.0 / 540.0 + s * 769.0 / 17280.0))));
}

double principal_seed(double z) {
  if (z < -0.32) return branch_point_seed(z, 1.0);
  if (std::abs(z) <= 0.1) {
    // Lagrange inversion series about 0.
    return z * (1.0 + z * (-1.0 + z * (1.5 + z * (-8.0 / 3.0 + z * 125.0 / 24.0))));
  }
  if (z < kE) {
    const double l = std::log1p(z);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l1 = std::log(z);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

double minus_one_seed(double z) {
  if (z < -0.25) return branch_point_seed(z, -1.0);
  const double l1 = std::log(-z);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

// Halley's update on f(w) = w e^w - z, kept on the requested side of -1.
double halley(double w, double z, Branch branch) {
  for (int step = 0; step < kMaxHalleySteps; ++step) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    double next = w - f / denom;
    if (branch == Branch::kPrincipal && next < -1.0) next = 0.5 * (w - 1.0);
    if (branch == Branch::kMinusOne && next > -1.0) next = 0.5 * (w - 1.0);
    const double dw = std::abs(next - w);
    w = next;
    if (dw <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) break;
  }
  return w;
}

// w e^w is increasing on [-1, inf) and decreasing on (-inf, -1].
double bisect(double lo, double hi, double z, Branch branch) {
  const double dir = branch == Branch::kPrincipal ? 1.0 : -1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (dir * residual(mid, z) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lambert_w(BranchArg arg) {
  const double z = arg.z;
  if (std::isnan(z)) throw DomainError("lambert_w: NaN argument");
  if (z < kMinusInvE - kBranchPointTolerance) {
    throw DomainError("lambert_w: z = " + std::to_string(z) + " is below -1/e");
  }
  if (arg.branch == Branch::kMinusOne && z >= 0.0) {
    throw DomainError("lambert_w: minus-one branch requires z < 0");
  }
  if (std::abs(z - kMinusInvE) <= kBranchPointTolerance) return -1.0;
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  const bool principal = arg.branch == Branch::kPrincipal;
  double w = halley(principal ? principal_seed(z) : minus_one_seed(z), z, arg.branch);
  if (std::abs(residual(w, z)) <= residual_bound(z)) return w;

  // Halley stalled; fall back to bisection on the monotone branch.
  if (principal) {
    w = z > 0.0 ? bisect(0.0, std::max(1.0, std::log1p(z)), z, arg.branch)
                : bisect(-1.0, 0.0, z, arg.branch);
  } else {
    w = bisect(2.0 * std::log(-z) - 1.0, -1.0, z, arg.branch);
  }
  return w;
}

}  // namespace aloha
