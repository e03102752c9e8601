#include "mixedcurv/expr.hpp"

#include <cctype>
#include <cmath>

#include "mixedcurv/errors.hpp"

namespace mixedcurv {

struct Expr::Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log } op;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> a, b;

  double eval(const double* x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x[var];
      case Op::Add: return a->eval(x) + b->eval(x);
      case Op::Sub: return a->eval(x) - b->eval(x);
      case Op::Mul: return a->eval(x) * b->eval(x);
      case Op::Div: return a->eval(x) / b->eval(x);
      case Op::Pow: return std::pow(a->eval(x), b->eval(x));
      case Op::Neg: return -a->eval(x);
      case Op::Sin: return std::sin(a->eval(x));
      case Op::Cos: return std::cos(a->eval(x));
      case Op::Exp: return std::exp(a->eval(x));
      case Op::Log: return std::log(a->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  int n_vars;

  explicit Parser(const std::string& text, int nv) : s(text), n_vars(nv) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& why) {
    throw BadInput("expression parse error at position " + std::to_string(pos) + ": " + why);
  }

  NodePtr make(Expr::Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr number() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                              s[pos] == 'e' || s[pos] == 'E' ||
                              ((s[pos] == '+' || s[pos] == '-') && pos > start &&
                               (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
      ++pos;
    if (pos == start) fail("expected a number");
    auto n = std::make_shared<Expr::Node>();
    n->op = Expr::Node::Op::Const;
    n->value = std::stod(s.substr(start, pos - start));
    return n;
  }

  NodePtr ident() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
    std::string name = s.substr(start, pos - start);
    if (name == "pi") {
      auto n = std::make_shared<Expr::Node>();
      n->op = Expr::Node::Op::Const;
      n->value = M_PI;
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      int idx = std::stoi(name.substr(1));
      if (idx < 1 || idx > n_vars) fail("coordinate index out of range in '" + name + "'");
      auto n = std::make_shared<Expr::Node>();
      n->op = Expr::Node::Op::Var;
      n->var = idx - 1;
      return n;
    }
    Expr::Node::Op op;
    if (name == "sin")
      op = Expr::Node::Op::Sin;
    else if (name == "cos")
      op = Expr::Node::Op::Cos;
    else if (name == "exp")
      op = Expr::Node::Op::Exp;
    else if (name == "log")
      op = Expr::Node::Op::Log;
    else
      fail("unknown identifier '" + name + "'");
    if (!eat('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!eat(')')) fail("expected ')'");
    return make(op, arg);
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == '-') {
      ++pos;
      return make(Expr::Node::Op::Neg, atom_pow());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr atom_pow() {
    NodePtr base = atom();
    skip();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      NodePtr e = atom_pow();  // right associative
      return make(Expr::Node::Op::Pow, base, e);
    }
    return base;
  }

  NodePtr term() {
    NodePtr lhs = atom_pow();
    for (;;) {
      skip();
      if (pos < s.size() && (s[pos] == '*' || s[pos] == '/')) {
        char op = s[pos++];
        NodePtr rhs = atom_pow();
        lhs = make(op == '*' ? Expr::Node::Op::Mul : Expr::Node::Op::Div, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip();
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        char op = s[pos++];
        NodePtr rhs = term();
        lhs = make(op == '+' ? Expr::Node::Op::Add : Expr::Node::Op::Sub, lhs, rhs);
      } else {
        return lhs;
      }
    }
  }
};

}  // namespace

Expr Expr::parse(const std::string& text, int n_vars) {
  Parser p(text, n_vars);
  Expr e;
  NodePtr root = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  e.root_ = root;
  return e;
}

double Expr::eval(const double* x) const {
  if (!root_) throw BadInput("empty expression");
  return root_->eval(x);
}

}  // namespace mixedcurv
