#include "divstab/density.hpp"

#include <cmath>

#include "divstab/linalg.hpp"

namespace divstab {

Expr squared_norm_expr(int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  Expr s = Expr::constant(0.0);
  for (int i = 1; i <= dim; ++i) {
    const Expr xi = Expr::variable(i);
    s = s + xi * xi;
  }
  return s;
}

Expr quadratic_form_expr(const Matrix& P) {
  if (P.rows() != P.cols() || P.rows() < 1)
    throw DimensionError("quadratic form needs a square matrix");
  const int n = static_cast<int>(P.rows());
  Expr s = Expr::constant(0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s = s + Expr::constant(P(i, j)) * Expr::variable(i + 1) * Expr::variable(j + 1);
    }
  }
  return s;
}

DensityFunction norm_power_density(double alpha, int dim) {
  if (!(alpha > 0.0)) throw Error("norm power density requires alpha > 0");
  const Expr ss = squared_norm_expr(dim);
  DensityFunction d;
  d.dim = dim;
  d.family = DensityFamily::NormPower;
  d.alpha = alpha;
  d.rho = pow(ss, Expr::constant(alpha));
  d.rho_inv = pow(ss, Expr::constant(-alpha));
  return d;
}

DensityFunction quadratic_form_density(const Matrix& P, double alpha) {
  if (!(alpha > 0.0)) throw Error("quadratic form density requires alpha > 0");
  if (P.rows() != P.cols() || P.rows() < 1)
    throw DimensionError("quadratic form density needs a square matrix");
  const double scale = P.cwiseAbs().maxCoeff();
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw Error("quadratic form density requires a symmetric matrix");
  if (!is_positive_definite(P, 1e-12 * (1.0 + scale)))
    throw Error("quadratic form density requires a positive definite matrix");
  const Expr q = quadratic_form_expr(P);
  DensityFunction d;
  d.dim = static_cast<int>(P.rows());
  d.family = DensityFamily::QuadraticForm;
  d.alpha = alpha;
  d.form = P;
  d.rho = pow(q, Expr::constant(alpha));
  d.rho_inv = pow(q, Expr::constant(-alpha));
  return d;
}

DensityFunction grad_norm_density(const ScalarFunction& S) {
  if (S.dim < 1) throw DimensionError("dimension must be positive");
  if (S.expr.max_variable() > S.dim)
    throw DimensionError("scalar function references variables beyond its dimension");
  const std::vector<Expr> g = gradient(S.expr, S.dim);
  Expr ss = Expr::constant(0.0);
  for (const Expr& gi : g) ss = ss + gi * gi;
  DensityFunction d;
  d.dim = S.dim;
  d.family = DensityFamily::GradNorm;
  d.rho = sqrt(ss);
  d.rho_inv = sqrt(ss) / (S.expr * S.expr);
  return d;
}

DensityFunction custom_density(int dim, Expr rho, Expr rho_inv) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  if (rho.max_variable() > dim || rho_inv.max_variable() > dim)
    throw DimensionError("density references variables beyond its dimension");
  DensityFunction d;
  d.dim = dim;
  d.family = DensityFamily::Custom;
  d.rho = std::move(rho);
  d.rho_inv = std::move(rho_inv);
  return d;
}

VectorField scale_field(const Expr& rho, const VectorField& f) {
  std::vector<Expr> comps;
  comps.reserve(f.components.size());
  for (const Expr& c : f.components) comps.push_back(rho * c);
  return VectorField(f.dim, std::move(comps));
}

}  // namespace divstab
