#pragma once

#include <memory>
#include <string>
#include <vector>

namespace mixedcurv {

// Arithmetic expressions over chart coordinates x1..xn with sin, cos, exp,
// log, +, -, *, /, ^ and numeric literals. Parsed once, evaluated many times.
class Expr {
 public:
  static Expr parse(const std::string& text, int n_vars);
  double eval(const double* x) const;

  Expr() = default;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace mixedcurv
