#pragma once

namespace aloha {

enum class Branch { kPrincipal, kMinusOne };

/// Real argument together with the branch to evaluate it on.
struct BranchArg {
  double z = 0.0;
  Branch branch = Branch::kPrincipal;
};

/// Distance from -1/e inside which both branches return exactly -1.
inline constexpr double kBranchPointTolerance = 1e-12;

/// -1/e
inline constexpr double kMinusInvE = -0.36787944117144232159552377016146;

/// Real Lambert W: the w with w * exp(w) == z on the requested branch.
///
/// Principal branch is defined for z >= -1/e and returns w >= -1; the
/// minus-one branch is defined for -1/e <= z < 0 and returns w <= -1. The
/// result satisfies |w e^w - z| <= 1e-12 * max(1, |z|).
///
/// Throws DomainError outside the branch domain.
double lambert_w(BranchArg arg);

inline double lambert_w0(double z) { return lambert_w({z, Branch::kPrincipal}); }
inline double lambert_wm1(double z) { return lambert_w({z, Branch::kMinusOne}); }

}  // namespace aloha
