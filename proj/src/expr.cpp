#include "divstab/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace divstab {

Expr make_unary(Expr::UnaryOp op, const Expr& a);
Expr make_binary(Expr::BinaryOp op, const Expr& a, const Expr& b);
Expr make_call(Expr::Fn fn, const Expr& a);

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* fn_name(Expr::Fn fn) {
  switch (fn) {
    case Expr::Fn::Sqrt: return "sqrt";
    case Expr::Fn::Exp: return "exp";
    case Expr::Fn::Ln: return "ln";
    case Expr::Fn::Sin: return "sin";
    case Expr::Fn::Cos: return "cos";
    case Expr::Fn::Abs: return "abs";
    case Expr::Fn::Sign: return "sign";
  }
  return "?";
}

double eval_node(const Expr::Node* n, const Vector& x) {
  switch (n->kind) {
    case Expr::Kind::Constant:
      return n->value;
    case Expr::Kind::Variable:
      if (n->var > x.size())
        throw DimensionError("expression references x" + std::to_string(n->var) +
                             " but the point has dimension " +
                             std::to_string(x.size()));
      return x(n->var - 1);
    case Expr::Kind::Unary:
      return -eval_node(n->a.get(), x);
    case Expr::Kind::Binary: {
      const double a = eval_node(n->a.get(), x);
      const double b = eval_node(n->b.get(), x);
      double r = 0.0;
      switch (n->bop) {
        case Expr::BinaryOp::Add: r = a + b; break;
        case Expr::BinaryOp::Sub: r = a - b; break;
        case Expr::BinaryOp::Mul: r = a * b; break;
        case Expr::BinaryOp::Div:
          if (b == 0.0) throw DomainError("division by zero", x);
          r = a / b;
          break;
        case Expr::BinaryOp::Pow:
          r = std::pow(a, b);
          break;
      }
      if (!std::isfinite(r)) throw DomainError("non-finite value in evaluation", x);
      return r;
    }
    case Expr::Kind::Call: {
      const double a = eval_node(n->a.get(), x);
      double r = 0.0;
      switch (n->fn) {
        case Expr::Fn::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative argument", x);
          r = std::sqrt(a);
          break;
        case Expr::Fn::Exp: r = std::exp(a); break;
        case Expr::Fn::Ln:
          if (a <= 0.0) throw DomainError("ln of a non-positive argument", x);
          r = std::log(a);
          break;
        case Expr::Fn::Sin: r = std::sin(a); break;
        case Expr::Fn::Cos: r = std::cos(a); break;
        case Expr::Fn::Abs: r = std::fabs(a); break;
        case Expr::Fn::Sign: r = (a > 0.0) ? 1.0 : (a < 0.0 ? -1.0 : 0.0); break;
      }
      if (!std::isfinite(r)) throw DomainError("non-finite value in evaluation", x);
      return r;
    }
  }
  throw Error("corrupt expression node");
}

int max_var_node(const Expr::Node* n) {
  switch (n->kind) {
    case Expr::Kind::Constant: return 0;
    case Expr::Kind::Variable: return n->var;
    case Expr::Kind::Unary:
    case Expr::Kind::Call: return max_var_node(n->a.get());
    case Expr::Kind::Binary:
      return std::max(max_var_node(n->a.get()), max_var_node(n->b.get()));
  }
  return 0;
}

}  // namespace

Expr::Expr() : node_(std::make_shared<Node>()) {}

Expr Expr::constant(double value) {
  Node n;
  n.kind = Kind::Constant;
  n.value = value;
  return Expr(std::make_shared<Node>(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw DimensionError("variable index must be positive");
  Node n;
  n.kind = Kind::Variable;
  n.var = index;
  return Expr(std::make_shared<Node>(n));
}

bool Expr::is_constant() const { return node_->kind == Kind::Constant; }

double Expr::constant_value() const {
  if (!is_constant()) throw Error("constant_value() on a non-constant expression");
  return node_->value;
}

double Expr::eval(const Vector& x) const { return eval_node(node_.get(), x); }

int Expr::max_variable() const { return max_var_node(node_.get()); }

// ---------------------------------------------------------------------------
// Construction with conservative simplification.

Expr make_unary(Expr::UnaryOp op, const Expr& a) {
  if (a.node_->kind == Expr::Kind::Constant)
    return Expr::constant(-a.node_->value);
  // --e collapses to e
  if (a.node_->kind == Expr::Kind::Unary) return Expr(a.node_->a);
  Expr::Node n;
  n.kind = Expr::Kind::Unary;
  n.uop = op;
  n.a = a.node_;
  return Expr(std::make_shared<Expr::Node>(n));
}

Expr make_binary(Expr::BinaryOp op, const Expr& a, const Expr& b) {
  const bool ca = a.node_->kind == Expr::Kind::Constant;
  const bool cb = b.node_->kind == Expr::Kind::Constant;
  const double va = ca ? a.node_->value : 0.0;
  const double vb = cb ? b.node_->value : 0.0;

  switch (op) {
    case Expr::BinaryOp::Add:
      if (ca && cb) return Expr::constant(va + vb);
      if (ca && va == 0.0) return b;
      if (cb && vb == 0.0) return a;
      break;
    case Expr::BinaryOp::Sub:
      if (ca && cb) return Expr::constant(va - vb);
      if (cb && vb == 0.0) return a;
      if (ca && va == 0.0) return make_unary(Expr::UnaryOp::Neg, b);
      break;
    case Expr::BinaryOp::Mul:
      if (ca && cb) return Expr::constant(va * vb);
      if ((ca && va == 0.0) || (cb && vb == 0.0)) return Expr::constant(0.0);
      if (ca && va == 1.0) return b;
      if (cb && vb == 1.0) return a;
      break;
    case Expr::BinaryOp::Div:
      if (cb && vb == 1.0) return a;
      if (ca && cb && vb != 0.0) return Expr::constant(va / vb);
      if (ca && va == 0.0) return Expr::constant(0.0);
      break;
    case Expr::BinaryOp::Pow:
      if (cb && vb == 1.0) return a;
      if (cb && vb == 0.0) return Expr::constant(1.0);
      if (ca && va == 1.0) return Expr::constant(1.0);
      if (ca && cb) {
        const double r = std::pow(va, vb);
        if (std::isfinite(r)) return Expr::constant(r);
      }
      break;
  }

  Expr::Node n;
  n.kind = Expr::Kind::Binary;
  n.bop = op;
  n.a = a.node_;
  n.b = b.node_;
  return Expr(std::make_shared<Expr::Node>(n));
}

Expr make_call(Expr::Fn fn, const Expr& a) {
  if (a.node_->kind == Expr::Kind::Constant) {
    Expr::Node probe;
    probe.kind = Expr::Kind::Call;
    probe.fn = fn;
    probe.a = a.node_;
    try {
      return Expr::constant(eval_node(&probe, Vector(0)));
    } catch (const Error&) {
      // keep the call node; evaluation reports the domain error in context
    }
  }
  Expr::Node n;
  n.kind = Expr::Kind::Call;
  n.fn = fn;
  n.a = a.node_;
  return Expr(std::make_shared<Expr::Node>(n));
}

Expr operator+(const Expr& a, const Expr& b) { return make_binary(Expr::BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return make_binary(Expr::BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return make_binary(Expr::BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return make_binary(Expr::BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return make_unary(Expr::UnaryOp::Neg, a); }

Expr pow(const Expr& base, const Expr& exponent) { return make_binary(Expr::BinaryOp::Pow, base, exponent); }
Expr sqrt(const Expr& a) { return make_call(Expr::Fn::Sqrt, a); }
Expr exp(const Expr& a) { return make_call(Expr::Fn::Exp, a); }
Expr ln(const Expr& a) { return make_call(Expr::Fn::Ln, a); }
Expr sin(const Expr& a) { return make_call(Expr::Fn::Sin, a); }
Expr cos(const Expr& a) { return make_call(Expr::Fn::Cos, a); }
Expr abs(const Expr& a) { return make_call(Expr::Fn::Abs, a); }
Expr sign(const Expr& a) { return make_call(Expr::Fn::Sign, a); }

// ---------------------------------------------------------------------------
// Differentiation.

Expr Expr::diff(int var) const {
  if (var < 1) throw DimensionError("derivative variable index must be positive");
  const Node* n = node_.get();
  switch (n->kind) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Variable:
      return constant(n->var == var ? 1.0 : 0.0);
    case Kind::Unary:
      return -Expr(n->a).diff(var);
    case Kind::Binary: {
      const Expr a(n->a);
      const Expr b(n->b);
      const Expr da = a.diff(var);
      const Expr db = b.diff(var);
      switch (n->bop) {
        case BinaryOp::Add: return da + db;
        case BinaryOp::Sub: return da - db;
        case BinaryOp::Mul: return da * b + a * db;
        case BinaryOp::Div: return (da * b - a * db) / (b * b);
        case BinaryOp::Pow:
          if (b.is_constant()) {
            const double c = b.constant_value();
            return constant(c) * pow(a, constant(c - 1.0)) * da;
          }
          // general u^v, defined where u > 0
          return pow(a, b) * (db * ln(a) + b * da / a);
      }
      break;
    }
    case Kind::Call: {
      const Expr a(n->a);
      const Expr da = a.diff(var);
      switch (n->fn) {
        case Fn::Sqrt: return da / (constant(2.0) * divstab::sqrt(a));
        case Fn::Exp: return divstab::exp(a) * da;
        case Fn::Ln: return da / a;
        case Fn::Sin: return divstab::cos(a) * da;
        case Fn::Cos: return -divstab::sin(a) * da;
        case Fn::Abs: return divstab::sign(a) * da;
        case Fn::Sign: return constant(0.0);
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing. Precedence: atoms 5, unary/pow 3, mul/div 2, add/sub 1. A node is
// parenthesized when its precedence is below what the position requires; pow
// operands require 4 since "^" neither chains nor accepts bare products.

namespace {

int node_prec(const Expr::Node* n) {
  switch (n->kind) {
    case Expr::Kind::Constant:
    case Expr::Kind::Variable:
    case Expr::Kind::Call: return 5;
    case Expr::Kind::Unary: return 3;
    case Expr::Kind::Binary:
      switch (n->bop) {
        case Expr::BinaryOp::Pow: return 3;
        case Expr::BinaryOp::Mul:
        case Expr::BinaryOp::Div: return 2;
        case Expr::BinaryOp::Add:
        case Expr::BinaryOp::Sub: return 1;
      }
  }
  return 5;
}

void print_node(const Expr::Node* n, int minprec, std::string& out) {
  if (node_prec(n) < minprec) {
    out += '(';
    print_node(n, 0, out);
    out += ')';
    return;
  }
  switch (n->kind) {
    case Expr::Kind::Constant:
      out += format_double(n->value);
      break;
    case Expr::Kind::Variable:
      out += 'x';
      out += std::to_string(n->var);
      break;
    case Expr::Kind::Unary:
      out += '-';
      print_node(n->a.get(), 4, out);
      break;
    case Expr::Kind::Binary: {
      const char* optext = "";
      int lp = 0, rp = 0;
      switch (n->bop) {
        case Expr::BinaryOp::Add: optext = " + "; lp = 1; rp = 2; break;
        case Expr::BinaryOp::Sub: optext = " - "; lp = 1; rp = 2; break;
        case Expr::BinaryOp::Mul: optext = "*"; lp = 2; rp = 3; break;
        case Expr::BinaryOp::Div: optext = "/"; lp = 2; rp = 3; break;
        case Expr::BinaryOp::Pow: optext = "^"; lp = 4; rp = 4; break;
      }
      print_node(n->a.get(), lp, out);
      out += optext;
      print_node(n->b.get(), rp, out);
      break;
    }
    case Expr::Kind::Call:
      out += fn_name(n->fn);
      out += '(';
      print_node(n->a.get(), 0, out);
      out += ')';
      break;
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_node(node_.get(), 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser.

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = e + parse_term();
      } else if (consume('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*')) {
        e = e * parse_factor();
      } else if (consume('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  // factor := unary ("^" unary)?  -- a second "^" is trailing garbage for the
  // caller to reject, which makes x1^2^3 a syntax error by design.
  Expr parse_factor() {
    Expr e = parse_unary();
    if (consume('^')) e = pow(e, parse_unary());
    return e;
  }

  Expr parse_unary() {
    if (consume('-')) return -parse_unary();
    return parse_base();
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!consume(')')) fail("expected ')'", pos_);
      return e;
    }
    if (c >= '0' && c <= '9') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_ident();
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("malformed number", pos_);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return Expr::constant(value);
  }

  Expr parse_ident() {
    const std::size_t start = pos_;
    std::string name;
    while (pos_ < text_.size() &&
           ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
            (text_[pos_] >= 'A' && text_[pos_] <= 'Z'))) {
      name += text_[pos_++];
    }
    if (name == "x") {
      const std::size_t digits_at = pos_;
      std::string digits;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9')
        digits += text_[pos_++];
      if (digits.empty() || digits[0] == '0')
        fail("variable index must start with a nonzero digit", digits_at);
      int index = 0;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), index);
      (void)ptr;
      if (ec != std::errc()) fail("variable index out of range", digits_at);
      if (index > dim_)
        fail("variable x" + digits + " exceeds dimension " + std::to_string(dim_),
             start);
      return Expr::variable(index);
    }
    static const std::pair<const char*, Expr::Fn> kFns[] = {
        {"sqrt", Expr::Fn::Sqrt}, {"exp", Expr::Fn::Exp}, {"ln", Expr::Fn::Ln},
        {"sin", Expr::Fn::Sin},   {"cos", Expr::Fn::Cos}, {"abs", Expr::Fn::Abs},
        {"sign", Expr::Fn::Sign},
    };
    for (const auto& [fname, fn] : kFns) {
      if (name == fname) {
        if (!consume('(')) fail("expected '(' after function name", pos_);
        Expr arg = parse_sum();
        if (!consume(')')) fail("expected ')'", pos_);
        return make_call(fn, arg);
      }
    }
    fail("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

Expr parse_expr(std::string_view text, int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  return Parser(text, dim).run();
}

// ---------------------------------------------------------------------------
// Fields.

VectorField::VectorField(int dim_in, std::vector<Expr> comps)
    : dim(dim_in), components(std::move(comps)) {
  if (dim < 1) throw DimensionError("field dimension must be positive");
  if (static_cast<int>(components.size()) != dim)
    throw DimensionError("field has " + std::to_string(components.size()) +
                         " components but dimension " + std::to_string(dim));
  for (const Expr& c : components) {
    if (c.max_variable() > dim)
      throw DimensionError("field component references x" +
                           std::to_string(c.max_variable()) +
                           " beyond dimension " + std::to_string(dim));
  }
}

Vector VectorField::eval(const Vector& x) const {
  if (x.size() != dim)
    throw DimensionError("point dimension " + std::to_string(x.size()) +
                         " does not match field dimension " + std::to_string(dim));
  Vector out(dim);
  for (int i = 0; i < dim; ++i) out(i) = components[i].eval(x);
  return out;
}

ExprMatrix::ExprMatrix(int rows_in, int cols_in)
    : rows(rows_in),
      cols(cols_in),
      entries(static_cast<std::size_t>(rows_in) * static_cast<std::size_t>(cols_in)) {
  if (rows_in < 1 || cols_in < 1)
    throw DimensionError("expression matrix must have positive dimensions");
}

Expr divergence(const VectorField& f) {
  Expr d = Expr::constant(0.0);
  for (int i = 0; i < f.dim; ++i) d = d + f.components[i].diff(i + 1);
  return d;
}

std::vector<Expr> gradient(const Expr& e, int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  if (e.max_variable() > dim)
    throw DimensionError("expression references variables beyond dimension " +
                         std::to_string(dim));
  std::vector<Expr> g;
  g.reserve(dim);
  for (int i = 1; i <= dim; ++i) g.push_back(e.diff(i));
  return g;
}

double fd_divergence(const VectorField& f, const Vector& p, double h) {
  if (h <= 0.0) throw Error("finite difference step must be positive");
  if (p.size() != f.dim)
    throw DimensionError("point dimension does not match field dimension");
  double s = 0.0;
  Vector q = p;
  for (int i = 0; i < f.dim; ++i) {
    q(i) = p(i) + h;
    const double fp = f.components[i].eval(q);
    q(i) = p(i) - h;
    const double fm = f.components[i].eval(q);
    q(i) = p(i);
    s += (fp - fm) / (2.0 * h);
  }
  return s;
}

VectorField linear_field(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionError("linear field needs a square matrix");
  const int n = static_cast<int>(A.rows());
  std::vector<Expr> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i) {
    Expr row = Expr::constant(0.0);
    for (int j = 0; j < n; ++j)
      row = row + Expr::constant(A(i, j)) * Expr::variable(j + 1);
    comps.push_back(row);
  }
  return VectorField(n, std::move(comps));
}

VectorField compose_affine(const VectorField& f, const ExprMatrix& g,
                           const std::vector<Expr>& u) {
  if (g.rows != f.dim)
    throw DimensionError("input gain rows do not match field dimension");
  if (static_cast<int>(u.size()) != g.cols)
    throw DimensionError("control vector length does not match input gain columns");
  std::vector<Expr> comps;
  comps.reserve(f.dim);
  for (int i = 0; i < f.dim; ++i) {
    Expr c = f.components[i];
    for (int j = 0; j < g.cols; ++j) c = c + g(i, j) * u[j];
    comps.push_back(c);
  }
  return VectorField(f.dim, std::move(comps));
}

}  // namespace divstab
