#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace adfv {

/// Error raised on malformed expressions; `column` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int column)
        : std::runtime_error(what + " (column " + std::to_string(column) + ")"),
          column_(column) {}
    int column() const { return column_; }

private:
    int column_;
};

/// A parsed scalar expression in the single variable x.
///
/// Grammar: numbers, identifier x, binary + - * / ^, unary -, parentheses,
/// and the functions exp, log, cos, sin, abs, sqrt, pow, min, max.
/// ^ is right-associative and binds tighter than any other binary operator.
class Expression {
public:
    struct Node;

    explicit Expression(std::shared_ptr<const Node> root, std::string source);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;

    /// Canonical fully-parenthesized form; re-parses to an equivalent evaluator.
    std::string pretty() const;

    const std::string& source() const { return source_; }

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

Expression parse_expression(const std::string& src);

}  // namespace adfv
