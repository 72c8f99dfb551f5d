#include "irg/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace irg {

namespace {

enum class Fn { kMin, kMax, kAbs, kExp, kLog, kSqrt, kSin, kCos, kFloor, kStep };

Fn fn_by_name(const std::string& name) {
  if (name == "min") return Fn::kMin;
  if (name == "max") return Fn::kMax;
  if (name == "abs") return Fn::kAbs;
  if (name == "exp") return Fn::kExp;
  if (name == "log") return Fn::kLog;
  if (name == "sqrt") return Fn::kSqrt;
  if (name == "sin") return Fn::kSin;
  if (name == "cos") return Fn::kCos;
  if (name == "floor") return Fn::kFloor;
  if (name == "step") return Fn::kStep;
  throw std::invalid_argument("expression: unknown function '" + name + "'");
}

int fn_arity(Fn f) { return (f == Fn::kMin || f == Fn::kMax) ? 2 : 1; }

}  // namespace

struct Expression::Node {
  enum Kind { kNum, kVarX, kVarY, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall } kind;
  double num = 0;
  Fn fn = Fn::kMin;
  std::vector<std::shared_ptr<const Node>> kids;

  double eval(double x, double y) const {
    switch (kind) {
      case kNum: return num;
      case kVarX: return x;
      case kVarY: return y;
      case kAdd: return kids[0]->eval(x, y) + kids[1]->eval(x, y);
      case kSub: return kids[0]->eval(x, y) - kids[1]->eval(x, y);
      case kMul: return kids[0]->eval(x, y) * kids[1]->eval(x, y);
      case kDiv: return kids[0]->eval(x, y) / kids[1]->eval(x, y);
      case kPow: return std::pow(kids[0]->eval(x, y), kids[1]->eval(x, y));
      case kNeg: return -kids[0]->eval(x, y);
      case kCall: {
        const double a = kids[0]->eval(x, y);
        switch (fn) {
          case Fn::kMin: return std::min(a, kids[1]->eval(x, y));
          case Fn::kMax: return std::max(a, kids[1]->eval(x, y));
          case Fn::kAbs: return std::fabs(a);
          case Fn::kExp: return std::exp(a);
          case Fn::kLog: return std::log(a);
          case Fn::kSqrt: return std::sqrt(a);
          case Fn::kSin: return std::sin(a);
          case Fn::kCos: return std::cos(a);
          case Fn::kFloor: return std::floor(a);
          case Fn::kStep: return a >= 0 ? 1.0 : 0.0;
        }
        return 0;
      }
    }
    return 0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Kind kind, std::vector<NodePtr> kids = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = std::move(kids);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        lhs = make(Node::kAdd, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      skip_ws();
      if (accept('*')) {
        lhs = make(Node::kMul, {lhs, factor()});
      } else if (accept('/')) {
        lhs = make(Node::kDiv, {lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    auto base = unary();
    skip_ws();
    if (accept('^')) return make(Node::kPow, {base, factor()});
    return base;
  }

  NodePtr unary() {
    skip_ws();
    if (accept('-')) return make(Node::kNeg, {unary()});
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s_.c_str() + pos_, &end);
      if (end == s_.c_str() + pos_) fail("bad number");
      pos_ = static_cast<std::size_t>(end - s_.c_str());
      auto n = std::make_shared<Node>();
      n->kind = Node::kNum;
      n->num = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        name += s_[pos_++];
      }
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        const Fn fn = fn_by_name(name);
        ++pos_;
        std::vector<NodePtr> args;
        args.push_back(expr());
        while (true) {
          skip_ws();
          if (accept(',')) {
            args.push_back(expr());
          } else {
            break;
          }
        }
        expect(')');
        if (static_cast<int>(args.size()) != fn_arity(fn))
          fail("wrong argument count for '" + name + "'");
        auto n = std::make_shared<Node>();
        n->kind = Node::kCall;
        n->fn = fn;
        n->kids = std::move(args);
        return n;
      }
      if (name == "x") return make(Node::kVarX);
      if (name == "y") return make(Node::kVarY);
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
    return nullptr;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument("expression: " + why + " at offset " +
                                std::to_string(pos_) + " in \"" + s_ + "\"");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  return Expression(text, Parser(text).run());
}

double Expression::eval(double x, double y) const { return root_->eval(x, y); }

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

}  // namespace irg
