#pragma once

#include <map>
#include <memory>
#include <string>

namespace resetfpt {

/// Scalar expression in one variable `x`, parsed once and evaluated many
/// times. Grammar: numbers, x, named constants, + - * / ^, parentheses,
/// unary minus, and the functions exp log sqrt sin cos tan asin acos atan
/// sinh cosh tanh abs. `^` is right associative. Parse errors throw
/// ConfigError with the offending position.
class Expression {
 public:
  explicit Expression(const std::string& source,
                      const std::map<std::string, double>& constants = {});

  double operator()(double x) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace resetfpt
