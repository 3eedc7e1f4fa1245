#include "pcap/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "pcap/errors.hpp"

namespace pcap {

struct Expression::Node {
  enum class Kind { kConst, kTime, kState, kNeg, kAdd, kSub, kMul, kDiv, kSin, kCos, kExp };

  Kind kind = Kind::kConst;
  double value = 0.0;
  int index = 0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;

  double eval(std::span<const double> y, double t) const {
    switch (kind) {
      case Kind::kConst: return value;
      case Kind::kTime: return t;
      case Kind::kState: return y[static_cast<std::size_t>(index)];
      case Kind::kNeg: return -lhs->eval(y, t);
      case Kind::kAdd: return lhs->eval(y, t) + rhs->eval(y, t);
      case Kind::kSub: return lhs->eval(y, t) - rhs->eval(y, t);
      case Kind::kMul: return lhs->eval(y, t) * rhs->eval(y, t);
      case Kind::kDiv: return lhs->eval(y, t) / rhs->eval(y, t);
      case Kind::kSin: return std::sin(lhs->eval(y, t));
      case Kind::kCos: return std::cos(lhs->eval(y, t));
      case Kind::kExp: return std::exp(lhs->eval(y, t));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using Kind = Node::Kind;

class Parser {
 public:
  Parser(std::string_view text, int dimension) : s_(text), d_(dimension) {}

  std::unique_ptr<Node> parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("expression '" + std::string(s_) + "': " + what +
                       " at position " + std::to_string(pos_));
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

  static std::unique_ptr<Node> binary(Kind k, std::unique_ptr<Node> a,
                                      std::unique_ptr<Node> b) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  std::unique_ptr<Node> expr() {
    auto e = term();
    for (;;) {
      if (accept('+')) {
        e = binary(Kind::kAdd, std::move(e), term());
      } else if (accept('-')) {
        e = binary(Kind::kSub, std::move(e), term());
      } else {
        return e;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto e = unary();
    for (;;) {
      if (accept('*')) {
        e = binary(Kind::kMul, std::move(e), unary());
      } else if (accept('/')) {
        e = binary(Kind::kDiv, std::move(e), unary());
      } else {
        return e;
      }
    }
  }

  std::unique_ptr<Node> unary() {
    if (accept('-')) return binary(Kind::kNeg, unary(), nullptr);
    if (accept('+')) return unary();
    return primary();
  }

  std::unique_ptr<Node> primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      auto e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  std::unique_ptr<Node> number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_unique<Node>();
    n->value = v;
    return n;
  }

  std::unique_ptr<Node> identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view id = s_.substr(start, pos_ - start);
    auto n = std::make_unique<Node>();
    if (id == "t") {
      n->kind = Kind::kTime;
    } else if (id == "pi") {
      n->value = std::numbers::pi;
    } else if (id == "sin" || id == "cos" || id == "exp") {
      n->kind = id == "sin" ? Kind::kSin : id == "cos" ? Kind::kCos : Kind::kExp;
      if (!accept('(')) fail("expected '(' after " + std::string(id));
      n->lhs = expr();
      if (!accept(')')) fail("expected ')'");
    } else if (id.size() > 1 && id[0] == 'y') {
      int i = 0;
      const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), i);
      if (ec != std::errc() || ptr != id.data() + id.size() || i < 1 || i > d_) {
        pos_ = start;
        fail("unknown state variable '" + std::string(id) + "'");
      }
      n->kind = Kind::kState;
      n->index = i - 1;
    } else {
      pos_ = start;
      fail("unknown identifier '" + std::string(id) + "'");
    }
    return n;
  }

  std::string_view s_;
  int d_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(std::string_view text, int dimension) {
  if (dimension < 1) throw InvalidInput("dimension must be positive");
  Parser p(text, dimension);
  std::shared_ptr<const Node> root = p.parse();
  return Expression(std::move(root), std::string(text));
}

double Expression::operator()(std::span<const double> y, double t) const {
  return root_->eval(y, t);
}

}  // namespace pcap
