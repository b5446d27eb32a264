#include "resetfpt/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "resetfpt/errors.hpp"

namespace resetfpt {

struct Expression::Node {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call } op;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x;
      case Op::Neg: return -lhs->eval(x);
      case Op::Add: return lhs->eval(x) + rhs->eval(x);
      case Op::Sub: return lhs->eval(x) - rhs->eval(x);
      case Op::Mul: return lhs->eval(x) * rhs->eval(x);
      case Op::Div: return lhs->eval(x) / rhs->eval(x);
      case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Op::Call: return fn(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

struct Function {
  const char* name;
  double (*fn)(double);
};

double fabs_wrap(double v) { return std::fabs(v); }

const Function kFunctions[] = {
    {"exp", [](double v) { return std::exp(v); }},   {"log", [](double v) { return std::log(v); }},
    {"sqrt", [](double v) { return std::sqrt(v); }}, {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},   {"tan", [](double v) { return std::tan(v); }},
    {"asin", [](double v) { return std::asin(v); }}, {"acos", [](double v) { return std::acos(v); }},
    {"atan", [](double v) { return std::atan(v); }}, {"sinh", [](double v) { return std::sinh(v); }},
    {"cosh", [](double v) { return std::cosh(v); }}, {"tanh", [](double v) { return std::tanh(v); }},
    {"abs", fabs_wrap},
};

class Parser {
 public:
  Parser(const std::string& s, const std::map<std::string, double>& constants)
      : s_(s), constants_(constants) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = make(Op::Add, n, product());
      else if (accept('-')) n = make(Op::Sub, n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::Mul, n, unary());
      else if (accept('/')) n = make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Op::Var);
      for (const Function& f : kFunctions) {
        if (name == f.name) {
          if (!accept('(')) fail("expected '(' after " + name);
          NodePtr arg = sum();
          if (!accept(')')) fail("expected ')'");
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Call;
          n->fn = f.fn;
          n->lhs = arg;
          return n;
        }
      }
      auto it = constants_.find(name);
      double v = 0.0;
      if (it != constants_.end()) v = it->second;
      else if (name == "pi") v = M_PI;
      else if (name == "e") v = M_E;
      else fail("unknown identifier '" + name + "'");
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source, const std::map<std::string, double>& constants)
    : source_(source), root_(Parser(source_, constants).parse()) {}

double Expression::operator()(double x) const { return root_->eval(x); }

}  // namespace resetfpt
