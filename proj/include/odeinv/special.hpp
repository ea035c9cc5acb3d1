#pragma once

#include <memory>
#include <vector>

#include "odeinv/compare.hpp"

namespace odeinv {

/// Differentiation with constraint rewrites: atoms named A vanish with all
/// their derivatives, and the derivative cascade rooted at R_{2.0}, R_{1.1}
/// and (once resolved) S_{3.0} replaces constrained atoms by their solved
/// right-hand sides, innermost first.
class RewriteDiff : public DiffContext {
 public:
  RewriteDiff(RatFunc r20, RatFunc r11, std::optional<RatFunc> s30);

  /// Reduced form of an atom under the constraint set (the atom itself when
  /// unconstrained).
  RatFunc reduce(const AtomPtr& a) const;

 protected:
  RatFunc atom_derivative_impl(const AtomPtr& a, Dir d) const override;

 private:
  RatFunc r20_, r11_;
  std::optional<RatFunc> s30_;
  mutable std::mutex mu_;
  mutable std::map<const AtomData*, RatFunc> memo_;
};

/// The coordinate chart where the frame is straightened: A = 0, P and Q are
/// determined by the free data B and F, and the derivatives R_{2.0}, R_{1.1},
/// S_{3.0} are resolved by the constraints.
struct SpecialFrame {
  RatFunc B, F, R, S;  // the opaque free data (atoms)
  RatFunc P, Q;        // -F^5/B^3 and B_{1.0}/(3B)
  RatFunc u, v;        // frame scaling factors B/F^2 and 3F/B
  RatFunc R20, R11, S30;  // resolved constraint right-hand sides
  std::shared_ptr<const RewriteDiff> ctx_pre;  // without the S_{3.0} rule
  std::shared_ptr<const RewriteDiff> ctx;      // full constraint set
  OdeRf ode;                                   // uses ctx
  /// Residuals of the derivative cascade against the printed formulas.
  std::vector<IdentityReport> build_checks;
};

SpecialFrame build_special();

/// Every general-coordinates quantity recomputed in the special chart and
/// compared against its printed reduced form, as exact normal-form
/// identities.
std::vector<IdentityReport> verify_reduced_forms(const SpecialFrame& frame);

/// The translation theorems verified between the printed reduced forms,
/// with the invariant differentiations in their straightened shape.
std::vector<IdentityReport> crosscheck_theorems(const SpecialFrame& frame);

/// The compatibility condition: the two routes to R_{2.1} disagree before
/// the S_{3.0} rewrite and agree after it.
struct CompatibilityCheck {
  RatFunc residual_before;  // nonzero
  RatFunc residual_after;   // zero
  bool passed() const {
    return !residual_before.is_zero() && residual_after.is_zero();
  }
};

CompatibilityCheck compatibility_condition(const SpecialFrame& frame);

}  // namespace odeinv
