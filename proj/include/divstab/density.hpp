#pragma once

#include <optional>

#include "divstab/expr.hpp"

namespace divstab {

enum class DensityFamily { NormPower, QuadraticForm, GradNorm, Custom };

/// Scalar function S(x) together with its dimension.
struct ScalarFunction {
  int dim = 0;
  Expr expr;
};

/// Density pair used by the divergence checks. rho is the weight itself and
/// rho_inv the companion weight of the reciprocal-form conditions. For the
/// norm-power and quadratic families rho_inv is literally 1/rho. For the
/// gradient family rho = |grad S| while rho_inv = |grad(1/S)| = |grad S|/S^2,
/// which is what the reciprocal condition of the first theorem actually
/// needs; do not assume rho*rho_inv == 1 there.
struct DensityFunction {
  int dim = 0;
  Expr rho;
  Expr rho_inv;
  DensityFamily family = DensityFamily::Custom;
  double alpha = 0.0;
  std::optional<Matrix> form;  // quadratic family only
};

/// x1^2 + ... + xn^2.
Expr squared_norm_expr(int dim);

/// x' P x expanded over the entries of P.
Expr quadratic_form_expr(const Matrix& P);

/// rho = |x|^(2 alpha). Requires alpha > 0.
DensityFunction norm_power_density(double alpha, int dim);

/// rho = (x' P x)^alpha for symmetric positive definite P. Requires alpha > 0.
DensityFunction quadratic_form_density(const Matrix& P, double alpha);

/// rho = |grad S|, rho_inv = |grad S| / S^2.
DensityFunction grad_norm_density(const ScalarFunction& S);

/// User-supplied pair; no relation between rho and rho_inv is enforced.
DensityFunction custom_density(int dim, Expr rho, Expr rho_inv);

/// Componentwise product rho * f.
VectorField scale_field(const Expr& rho, const VectorField& f);

}  // namespace divstab
