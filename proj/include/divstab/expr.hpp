#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "divstab/errors.hpp"

namespace divstab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Immutable scalar expression over variables x1..xn. Copies are cheap
/// (shared subtrees). Construction folds constants and applies the usual
/// identity and annihilator rules (e + 0, 1 * e, 0 * e, e^1, ...), nothing
/// more aggressive, so printed output stays close to what was built.
class Expr {
 public:
  enum class Kind { Constant, Variable, Unary, Binary, Call };
  enum class UnaryOp { Neg };
  enum class BinaryOp { Add, Sub, Mul, Div, Pow };
  enum class Fn { Sqrt, Exp, Ln, Sin, Cos, Abs, Sign };

  /// Tree node. Treat as read-only; Expr owns construction.
  struct Node {
    Kind kind = Kind::Constant;
    double value = 0.0;  // Constant
    int var = 0;         // Variable, 1-based
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    Fn fn = Fn::Sqrt;
    std::shared_ptr<const Node> a, b;
  };

  /// The zero constant.
  Expr();

  static Expr constant(double value);
  /// 1-based variable index, i.e. variable(2) is "x2".
  static Expr variable(int index);

  /// Evaluates at x, where x(i-1) is the value of xi. Throws DomainError on
  /// undefined values and DimensionError if a variable index exceeds x.size().
  double eval(const Vector& x) const;

  /// Partial derivative with respect to x<var>. abs differentiates to sign;
  /// the kink at 0 is the caller's problem.
  Expr diff(int var) const;

  /// Renders to text the parser accepts back. Reparsing evaluates identically;
  /// the tree itself is also preserved up to redundant parentheses.
  std::string str() const;

  /// Largest variable index referenced, 0 for constant expressions.
  int max_variable() const;

  bool is_constant() const;
  double constant_value() const;

  Kind kind() const { return node_->kind; }

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_unary(Expr::UnaryOp, const Expr&);
  friend Expr make_binary(Expr::BinaryOp, const Expr&, const Expr&);
  friend Expr make_call(Expr::Fn, const Expr&);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr pow(const Expr& base, const Expr& exponent);
Expr sqrt(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr abs(const Expr& a);
Expr sign(const Expr& a);

/// Parses the expression grammar
///
///   expr   := term (("+" | "-") term)*
///   term   := factor (("*" | "/") factor)*
///   factor := unary ("^" unary)?
///   unary  := "-" unary | base
///   base   := NUMBER | IDENT | "(" expr ")" | FUNC "(" expr ")"
///
/// IDENT is x1, x2, ...; FUNC is sqrt, exp, ln, sin, cos, abs (plus sign, so
/// printed derivatives of abs parse back). "^" does not chain: x1^2^3 is a
/// syntax error. Unary minus binds inside "^", so -x1^2 is (-x1)^2.
/// Variables above dim and any trailing input are rejected with a ParseError
/// carrying the byte offset.
Expr parse_expr(std::string_view text, int dim);

/// Vector field on R^n with expression components f1..fn over x1..xn.
struct VectorField {
  int dim = 0;
  std::vector<Expr> components;

  VectorField() = default;
  /// Throws DimensionError unless components.size() == dim and every
  /// component references only x1..xdim.
  VectorField(int dim, std::vector<Expr> components);

  Vector eval(const Vector& x) const;
};

/// Dense matrix of expressions (input gain columns, mostly).
struct ExprMatrix {
  int rows = 0, cols = 0;
  std::vector<Expr> entries;  // row-major

  ExprMatrix() = default;
  ExprMatrix(int rows, int cols);
  const Expr& operator()(int i, int j) const { return entries[i * cols + j]; }
  Expr& operator()(int i, int j) { return entries[i * cols + j]; }
};

/// sum_i d f_i / d x_i, built symbolically.
Expr divergence(const VectorField& f);

/// Gradient of e as expressions d e / d x1 .. d e / d xn.
std::vector<Expr> gradient(const Expr& e, int dim);

/// Central-difference estimate of div f at p with step h per coordinate.
/// Independent of Expr::diff; used to cross-check it.
double fd_divergence(const VectorField& f, const Vector& p, double h = 1e-5);

/// The field x -> A x.
VectorField linear_field(const Matrix& A);

/// Closed loop f + g u with g n-by-m over expressions and u of length m.
VectorField compose_affine(const VectorField& f, const ExprMatrix& g,
                           const std::vector<Expr>& u);

}  // namespace divstab
