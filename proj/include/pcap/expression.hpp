#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace pcap {

/// Right-hand side g(y_1, ..., y_d, t) parsed from text.
///
/// Grammar: numbers, `t`, `y1`..`yd`, `pi`, unary minus, parentheses,
/// `+ - * /` with the usual precedence, and `sin`, `cos`, `exp` calls.
class Expression {
 public:
  /// Throws InvalidInput with the offending position on parse errors or on
  /// state references beyond `dimension`.
  static Expression parse(std::string_view text, int dimension);

  double operator()(std::span<const double> y, double t) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string text);

  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pcap
