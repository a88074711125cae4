#include "prescurv/expr.hpp"

#include <array>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include "prescurv/errors.hpp"

namespace prescurv::expr {

NodePtr number(double x) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->number = x;
    return n;
}

NodePtr variable(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = name;
    return n;
}

NodePtr call(const std::string& name, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->name = name;
    n->args = std::move(args);
    return n;
}

NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
}

NodePtr negate(NodePtr child) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Negate;
    n->args = {std::move(child)};
    return n;
}

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "expression error at offset " << pos << ": " << what;
        throw ValidationError(os.str());
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    NodePtr parse_expression() {
        NodePtr lhs = parse_term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos;
            lhs = binary(c, lhs, parse_term());
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos;
            lhs = binary(c, lhs, parse_unary());
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return negate(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (eat('^')) return binary('^', base, parse_unary());  // right-associative
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expression();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
            ++pos;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        double value = 0.0;
        auto res = std::from_chars(text.data() + start, text.data() + pos, value);
        if (res.ec != std::errc() || res.ptr != text.data() + pos) {
            pos = start;
            fail("malformed number");
        }
        return number(value);
    }

    NodePtr parse_ident() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (eat('(')) {
            std::vector<NodePtr> args;
            if (!eat(')')) {
                args.push_back(parse_expression());
                while (eat(',')) args.push_back(parse_expression());
                if (!eat(')')) fail("expected ')' after call arguments");
            }
            return call(name, std::move(args));
        }
        return variable(name);
    }
};

int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::Number: return n.number < 0 ? 1 : 4;
        case Kind::Variable:
        case Kind::Call: return 4;
        case Kind::Negate: return 1;
        case Kind::Binary: return (n.op == '+' || n.op == '-') ? 1 : (n.op == '^' ? 3 : 2);
    }
    return 4;
}

void serialize_into(const NodePtr& n, std::string& out, int parent_prec, bool rhs_of_minus_like) {
    const int prec = precedence(*n);
    const bool need_parens = prec < parent_prec || (prec == parent_prec && rhs_of_minus_like);
    if (need_parens) out += '(';
    switch (n->kind) {
        case Kind::Number:
            out += format_double(n->number);
            break;
        case Kind::Variable:
            out += n->name;
            break;
        case Kind::Call:
            out += n->name;
            out += '(';
            for (size_t i = 0; i < n->args.size(); ++i) {
                if (i) out += ", ";
                serialize_into(n->args[i], out, 0, false);
            }
            out += ')';
            break;
        case Kind::Negate:
            out += '-';
            serialize_into(n->args[0], out, 2, false);
            break;
        case Kind::Binary: {
            const char op = n->op;
            serialize_into(n->args[0], out, prec, false);
            out += ' ';
            out += op;
            out += ' ';
            // - and / are left-associative, ^ right-associative: the
            // right operand of - and / needs parens at equal precedence,
            // the left operand of ^ does (handled by prec + 1 below).
            if (op == '^') {
                serialize_into(n->args[1], out, prec, false);
            } else {
                serialize_into(n->args[1], out, prec, op == '-' || op == '/');
            }
            break;
        }
    }
    if (need_parens) out += ')';
}

double apply_call(const std::string& name, double x) {
    if (name == "exp") return std::exp(x);
    if (name == "log") return std::log(x);
    if (name == "sin") return std::sin(x);
    if (name == "cos") return std::cos(x);
    if (name == "sinh") return std::sinh(x);
    if (name == "cosh") return std::cosh(x);
    throw ValidationError("unknown function '" + name + "'");
}

double apply_call_derivative(const std::string& name, double x) {
    if (name == "exp") return std::exp(x);
    if (name == "log") return 1.0 / x;
    if (name == "sin") return std::cos(x);
    if (name == "cos") return -std::sin(x);
    if (name == "sinh") return std::cosh(x);
    if (name == "cosh") return std::sinh(x);
    throw ValidationError("unknown function '" + name + "'");
}

double checked_pow(double base, double exponent) {
    if (base > 0.0) return std::pow(base, exponent);
    if (base == 0.0 && exponent > 0.0) return 0.0;
    if (exponent == std::floor(exponent)) return std::pow(base, exponent);
    throw ValidationError("power with non-positive base and non-integer exponent");
}

}  // namespace

NodePtr parse(const std::string& text) {
    Parser p(text);
    NodePtr root = p.parse_expression();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return root;
}

std::string serialize(const NodePtr& n) {
    std::string out;
    serialize_into(n, out, 0, false);
    return out;
}

double evaluate(const NodePtr& n, const Env& env) {
    switch (n->kind) {
        case Kind::Number:
            return n->number;
        case Kind::Variable: {
            auto it = env.find(n->name);
            if (it == env.end()) throw ValidationError("unknown variable '" + n->name + "'");
            return it->second;
        }
        case Kind::Call: {
            if (n->args.size() != 1)
                throw ValidationError("function '" + n->name + "' takes one argument");
            return apply_call(n->name, evaluate(n->args[0], env));
        }
        case Kind::Negate:
            return -evaluate(n->args[0], env);
        case Kind::Binary: {
            const double a = evaluate(n->args[0], env);
            const double b = evaluate(n->args[1], env);
            switch (n->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return checked_pow(a, b);
            }
            throw ValidationError("unknown operator");
        }
    }
    throw ValidationError("corrupt expression node");
}

std::pair<double, double> evaluate_with_derivative(const NodePtr& n, const Env& env,
                                                   const std::string& var) {
    switch (n->kind) {
        case Kind::Number:
            return {n->number, 0.0};
        case Kind::Variable: {
            auto it = env.find(n->name);
            if (it == env.end()) throw ValidationError("unknown variable '" + n->name + "'");
            return {it->second, n->name == var ? 1.0 : 0.0};
        }
        case Kind::Call: {
            if (n->args.size() != 1)
                throw ValidationError("function '" + n->name + "' takes one argument");
            auto [x, dx] = evaluate_with_derivative(n->args[0], env, var);
            return {apply_call(n->name, x), apply_call_derivative(n->name, x) * dx};
        }
        case Kind::Negate: {
            auto [x, dx] = evaluate_with_derivative(n->args[0], env, var);
            return {-x, -dx};
        }
        case Kind::Binary: {
            auto [a, da] = evaluate_with_derivative(n->args[0], env, var);
            auto [b, db] = evaluate_with_derivative(n->args[1], env, var);
            switch (n->op) {
                case '+': return {a + b, da + db};
                case '-': return {a - b, da - db};
                case '*': return {a * b, da * b + a * db};
                case '/': return {a / b, (da * b - a * db) / (b * b)};
                case '^': {
                    const double v = checked_pow(a, b);
                    if (db == 0.0) return {v, b * checked_pow(a, b - 1.0) * da};
                    if (!(a > 0.0))
                        throw ValidationError("power derivative needs a positive base");
                    return {v, v * (db * std::log(a) + b * da / a)};
                }
            }
            throw ValidationError("unknown operator");
        }
    }
    throw ValidationError("corrupt expression node");
}

std::string format_double(double x) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    assert(res.ec == std::errc());
    return std::string(buf.data(), res.ptr);
}

}  // namespace prescurv::expr
