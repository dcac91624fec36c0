// Recursive-descent parser for symbol expressions.
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "bispec/symbols.hpp"

namespace bispec {

struct Expression::Node {
  enum Kind { Number, Var, Unary, Binary, Call } kind;
  double value = 0.0;
  int var = 0;       // 1 or 2
  char op = 0;       // + - * / ^
  std::string fn;
  std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

double checked_pow(double base, double ex) {
  if (base < 0.0 && ex != std::floor(ex))
    throw NumericalError("pow: negative base " + std::to_string(base) +
                         " with non-integer exponent " + std::to_string(ex));
  return std::pow(base, ex);
}

double eval_node(const Node& n, double l1, double l2) {
  switch (n.kind) {
    case Node::Number:
      return n.value;
    case Node::Var:
      return n.var == 1 ? l1 : l2;
    case Node::Unary:
      return -eval_node(*n.kids[0], l1, l2);
    case Node::Binary: {
      double a = eval_node(*n.kids[0], l1, l2);
      double b = eval_node(*n.kids[1], l1, l2);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return checked_pow(a, b);
      }
    }
    case Node::Call: {
      double a = eval_node(*n.kids[0], l1, l2);
      if (n.fn == "sin") return std::sin(a);
      if (n.fn == "cos") return std::cos(a);
      if (n.fn == "exp") return std::exp(a);
      if (n.fn == "abs") return std::fabs(a);
      if (n.fn == "sqrt") {
        if (a < 0.0) throw NumericalError("sqrt of negative value");
        return std::sqrt(a);
      }
      double b = eval_node(*n.kids[1], l1, l2);
      if (n.fn == "min") return std::min(a, b);
      if (n.fn == "max") return std::max(a, b);
      return checked_pow(a, b);
    }
  }
  return 0.0;
}

bool node_uses(const Node& n, int var) {
  if (n.kind == Node::Var) return n.var == var;
  for (auto& k : n.kids)
    if (node_uses(*k, var)) return true;
  return false;
}

int arity_of(const std::string& fn) {
  if (fn == "sin" || fn == "cos" || fn == "exp" || fn == "abs" || fn == "sqrt") return 1;
  if (fn == "min" || fn == "max" || fn == "pow") return 2;
  return -1;
}

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("syntax error at position " + std::to_string(pos_) + ": " + what);
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

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Binary;
    n->op = op;
    n->kids = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (accept('+')) left = binary('+', left, term());
      else if (accept('-')) left = binary('-', left, term());
      else return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*')) left = binary('*', left, unary());
      else if (accept('/')) left = binary('/', left, unary());
      else return left;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Unary;
      n->kids = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->kind = Node::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string id = s_.substr(start, pos_ - start);
    if (id == "l1" || id == "l2") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Var;
      n->var = id == "l1" ? 1 : 2;
      return n;
    }
    int arity = arity_of(id);
    if (arity < 0)
      throw ValidationError("unknown identifier '" + id + "' at position " + std::to_string(start));
    if (!accept('(')) fail("expected '(' after function '" + id + "'");
    auto n = std::make_shared<Node>();
    n->kind = Node::Call;
    n->fn = id;
    if (!accept(')')) {
      do {
        n->kids.push_back(expr());
      } while (accept(','));
      if (!accept(')')) fail("expected ')' closing call to '" + id + "'");
    }
    if (static_cast<int>(n->kids.size()) != arity)
      throw ValidationError("arity mismatch: '" + id + "' expects " + std::to_string(arity) +
                            " argument(s), got " + std::to_string(n->kids.size()));
    return n;
  }
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expression::eval(double l1, double l2) const { return eval_node(*root_, l1, l2); }

bool Expression::uses_l2() const { return node_uses(*root_, 2); }

Expression parse_expression(const std::string& expr) {
  Parser p(expr);
  return Expression(p.parse(), expr);
}

Symbol2D parse_symbol(const std::string& expr) {
  Expression e = parse_expression(expr);
  Symbol2D s;
  s.evaluator = [e](double l1, double l2) { return cplx(e.eval(l1, l2), 0.0); };
  s.name = "expr:" + expr;
  return s;
}

Symbol1D parse_univariate(const std::string& expr) {
  Expression e = parse_expression(expr);
  if (e.uses_l2()) throw ValidationError("univariate symbol may only use l1: " + expr);
  Symbol1D s;
  s.evaluator = [e](double l) { return cplx(e.eval(l, 0.0), 0.0); };
  s.name = "expr:" + expr;
  return s;
}

}  // namespace bispec
