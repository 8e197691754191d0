#include "adfv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace adfv {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call };
    Kind kind;
    double number = 0.0;
    char op = 0;               // + - * / ^ for Binary, '-' for Unary
    std::string name;          // function name for Call
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->number = v;
    return n;
}

NodePtr make_var() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Variable;
    return n;
}

NodePtr make_unary(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Unary;
    n->op = '-';
    n->args = {std::move(a)};
    return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
}

NodePtr make_call(std::string name, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
}

int function_arity(const std::string& name) {
    if (name == "exp" || name == "log" || name == "cos" || name == "sin" ||
        name == "abs" || name == "sqrt")
        return 1;
    if (name == "pow" || name == "min" || name == "max") return 2;
    return -1;
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr parse() {
        skip_space();
        NodePtr e = parse_sum();
        skip_space();
        if (pos_ < src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            lhs = make_binary(c, lhs, parse_product());
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            lhs = make_binary(c, lhs, parse_unary());
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make_unary(parse_unary());
        return parse_power();
    }

    // Right-associative: a^b^c = a^(b^c). The exponent may carry a unary sign.
    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) {
            NodePtr exponent = consume('-') ? make_unary(parse_power()) : parse_power();
            return make_binary('^', base, exponent);
        }
        return base;
    }

    NodePtr parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (c == '\0') fail("unexpected end of input");
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        skip_space();
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        // Reject an exponent suffix glued onto an operator, e.g. "1e+" parses as 1.
        pos_ += static_cast<std::size_t>(end - begin);
        return make_number(v);
    }

    NodePtr parse_identifier() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (peek() != '(') {
            if (name == "x") return make_var();
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        int arity = function_arity(name);
        if (arity < 0) {
            pos_ = start;
            fail("unknown function '" + name + "'");
        }
        ++pos_;  // '('
        std::vector<NodePtr> args;
        if (peek() != ')') {
            args.push_back(parse_sum());
            while (consume(',')) args.push_back(parse_sum());
        }
        if (!consume(')')) fail("expected ')' after function arguments");
        if (static_cast<int>(args.size()) != arity)
            fail("function '" + name + "' expects " + std::to_string(arity) + " argument(s), got " +
                 std::to_string(args.size()));
        return make_call(std::move(name), std::move(args));
    }
};

double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case Node::Kind::Number:
            return n.number;
        case Node::Kind::Variable:
            return x;
        case Node::Kind::Unary:
            return -eval_node(*n.args[0], x);
        case Node::Kind::Binary: {
            double a = eval_node(*n.args[0], x);
            double b = eval_node(*n.args[1], x);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            return 0.0;
        }
        case Node::Kind::Call: {
            double a = eval_node(*n.args[0], x);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "log") return std::log(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "abs") return std::abs(a);
            if (n.name == "sqrt") return std::sqrt(a);
            double b = eval_node(*n.args[1], x);
            if (n.name == "pow") return std::pow(a, b);
            if (n.name == "min") return std::min(a, b);
            return std::max(a, b);
        }
    }
    return 0.0;
}

void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
        case Node::Kind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.number;
            os << tmp.str();
            return;
        }
        case Node::Kind::Variable:
            os << 'x';
            return;
        case Node::Kind::Unary:
            os << "(-";
            print_node(*n.args[0], os);
            os << ')';
            return;
        case Node::Kind::Binary:
            os << '(';
            print_node(*n.args[0], os);
            os << n.op;
            print_node(*n.args[1], os);
            os << ')';
            return;
        case Node::Kind::Call:
            os << n.name << '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) os << ',';
                print_node(*n.args[i], os);
            }
            os << ')';
            return;
    }
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

double Expression::eval(double x) const { return eval_node(*root_, x); }

std::string Expression::pretty() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

Expression parse_expression(const std::string& src) {
    Parser p(src);
    return Expression(p.parse(), src);
}

}  // namespace adfv
