#pragma once

#include <optional>
#include <vector>

#include "odeinv/invariants_bgd.hpp"
#include "odeinv/invariants_sd.hpp"

namespace odeinv {

enum class VerdictKind { GeneralPosition, MaximalDegeneration, OtherCase };

struct Verdict {
  VerdictKind kind = VerdictKind::OtherCase;
  /// Point with F^5 != 0 (general position only).
  std::optional<std::pair<Rational, Rational>> witness;
  std::optional<Rational> f5_at_witness;
  /// Set when the verdict rests on numeric probes rather than normal forms.
  bool probabilistic = false;

  std::string describe() const;
};

/// Maximal degeneration when A and B both normalize to zero; general
/// position at a point where F^5 does not vanish (the given point, or a
/// seeded search over 100 rational points); everything else is OtherCase.
Verdict classify(const OdeCoefficients& ode,
                 std::optional<std::pair<Rational, Rational>> point = {},
                 uint64_t seed = 0);

enum class CheckStatus { ExactZero, NumericZero, Failed };

struct IdentityReport {
  std::string name;
  CheckStatus status = CheckStatus::Failed;
  std::string residual;  // canonical form of the residual
  double tolerance = 0.0;

  bool passed() const { return status != CheckStatus::Failed; }
};

IdentityReport report_zero(const std::string& name, const RatFunc& residual);
IdentityReport report_zero(const std::string& name, const FExt& residual,
                           uint64_t seed = 0, double tol = 1e-9);

/// Every cross-scheme identity the two chains satisfy, one report each.
/// Identities needing general position are skipped for degenerate inputs.
std::vector<IdentityReport> verify_identities(const OdeCoefficients& ode,
                                              uint64_t seed = 0,
                                              double tol = 1e-9);

/// The Theorem 5.2/5.3 translation formulas between the two scalar
/// quadruples, both directions, plus the I7 recovery.
std::vector<IdentityReport> crosswalk(const SdScalars& sd,
                                      const BgdScalars& bgd,
                                      const std::array<FExt, 2>& D1,
                                      const std::array<FExt, 2>& D2,
                                      uint64_t seed = 0, double tol = 1e-9);

std::string status_name(CheckStatus s);

/// Numeric verification of the transformation behavior under one map:
/// weight-0 scalars match at matched points, F^5 scales with the fifth power
/// of the Jacobian determinant, both covectors obey the component law, and
/// the classification verdict is preserved.
std::vector<IdentityReport> check_transformation_laws(
    const OdeCoefficients& ode, const PointTransformation& t, int points,
    uint64_t seed = 0, double tol = 1e-9);

}  // namespace odeinv
