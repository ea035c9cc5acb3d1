#pragma once

#include <array>
#include <optional>

#include "odeinv/expr.hpp"

namespace odeinv {

class TransformError : public KernelError {
 public:
  using KernelError::KernelError;
};

/// Coefficients of y'' = P + 3 Q y' + 3 R y'^2 + S y'^3 as expressions in
/// x, y (in whatever coordinate chart the equation lives in).
struct OdeCoefficients {
  Expr P, Q, R, S;

  static OdeCoefficients zero();
  static OdeCoefficients from_strings(std::string_view p, std::string_view q,
                                      std::string_view r, std::string_view s);
};

/// The working view used by the invariant machinery: coefficients in normal
/// form plus the differentiation strategy for their atoms.
struct OdeRf {
  RatFunc P, Q, R, S;
  const DiffContext* ctx = &PlainDiff::instance();

  RatFunc d(const RatFunc& v, Dir dir) const { return ctx->diff(v, dir); }
};

OdeRf ode_rf(const OdeCoefficients& ode);

/// An invertible change of both coordinates. The forward maps are expressions
/// in (x, y); the inverse maps are expressions in the tilde coordinates,
/// which are written with the same two variable symbols.
struct PointTransformation {
  Expr fwd_x, fwd_y;  // xt(x,y), yt(x,y)
  Expr inv_x, inv_y;  // x(xt,yt), y(xt,yt)

  static PointTransformation identity();
  /// Lines `xt = ...`, `yt = ...` (in x,y) and `x = ...`, `y = ...`
  /// (in xt,yt); '#' comments.
  static PointTransformation parse_file(std::string_view text);
};

/// t1 followed by t2.
PointTransformation compose(const PointTransformation& t1,
                            const PointTransformation& t2);

/// Checks the declared inverse numerically: round trip within tol at
/// `points` random sample points, nonzero Jacobian determinant at each.
void validate_transformation(const PointTransformation& t, uint64_t seed = 0,
                             int points = 20, double tol = 1e-9);

/// The direct and inverse transition matrices: T from the forward map's
/// partials (functions of x,y), S from the inverse map's partials (functions
/// of the tilde coordinates).
struct TransitionMatrices {
  std::array<std::array<Expr, 2>, 2> Smat, Tmat;
  Expr detS, detT;
};

TransitionMatrices jacobians(const PointTransformation& t);

/// Coefficients of the same second-order equation written in the tilde
/// coordinates. The result is exact: the transformed equation is verified to
/// be cubic in the new first derivative, and the four coefficients are
/// extracted with the factor-3 convention.
OdeCoefficients pullback(const OdeCoefficients& ode,
                         const PointTransformation& t);

/// Indexed array of components transforming with r copies of the direct
/// transition matrix, s copies of the inverse one, and (det T)^m.
struct PseudoField {
  int r = 0, s = 0;
  int weight = 0;
  /// 2^(r+s) components; the index packs the upper indices then the lower
  /// ones, most significant first, each bit 0/1 for coordinate 1/2.
  std::vector<Expr> comps;

  static PseudoField scalar(Expr value, int weight);
  static PseudoField covector(Expr c1, Expr c2, int weight);
  static PseudoField vector(Expr c1, Expr c2, int weight);
  static PseudoField matrix_lower(std::array<std::array<Expr, 2>, 2> d,
                                  int weight);  // valence (0,2)
  static PseudoField matrix_upper(std::array<std::array<Expr, 2>, 2> d,
                                  int weight);  // valence (2,0)
};

/// Applies the transformation law literally: components in the original
/// coordinates from components in the tilde coordinates (given as
/// expressions in the tilde chart). Components must be free of opaque
/// symbols, whose dependence on the chart is unknown.
PseudoField transform_components(const PseudoField& tilde_field,
                                 const PointTransformation& t);

/// Same law evaluated numerically at one point: tilde components are values
/// at the image point, the matrices are evaluated at the original point.
std::vector<double> transform_components_at(
    const PseudoField& shape, const std::vector<double>& tilde_values,
    const std::array<std::array<double, 2>, 2>& Smat_at,
    const std::array<std::array<double, 2>, 2>& Tmat_at, double detT_at);

/// Index raising with the skew pseudotensor d: (a1, a2) -> (a2, -a1),
/// weight increases by one.
PseudoField raise_index(const PseudoField& covector);

}  // namespace odeinv
