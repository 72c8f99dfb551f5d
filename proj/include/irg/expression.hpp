#pragma once

#include <memory>
#include <string>
#include <vector>

namespace irg {

/// Compiled arithmetic expression in the variables x and y.
///
/// Grammar: + - * / ^ (right assoc), unary minus, parentheses, numeric
/// literals, and the functions min, max, abs, exp, log, sqrt, sin, cos,
/// floor, step (step(t) = 1 for t >= 0, else 0).
class Expression {
 public:
  static Expression parse(const std::string& text);

  double eval(double x, double y) const;
  const std::string& text() const { return text_; }

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  ~Expression();

  struct Node;  // exposed for the parser implementation

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace irg
