#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace prescurv::expr {

// Small arithmetic AST shared by the right-hand-side grammar
// (variables y1, y2, u) and the curvature-function syntax (sigma(k)).
struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Kind { Number, Variable, Call, Binary, Negate };

struct Node {
    Kind kind;
    double number = 0.0;          // Number
    std::string name;             // Variable, Call
    char op = 0;                  // Binary: + - * / ^
    std::vector<NodePtr> args;    // Call arguments, Binary operands, Negate child
};

NodePtr number(double x);
NodePtr variable(const std::string& name);
NodePtr call(const std::string& name, std::vector<NodePtr> args);
NodePtr binary(char op, NodePtr lhs, NodePtr rhs);
NodePtr negate(NodePtr child);

// Parses the documented grammar: numbers, identifiers, function calls,
// + - * / ^ (right-associative ^), unary minus, parentheses.
// Throws ValidationError with position information on malformed input.
NodePtr parse(const std::string& text);

// Canonical text form; parse(serialize(n)) reproduces n.  Numbers are
// printed in shortest round-trip form.
std::string serialize(const NodePtr& n);

using Env = std::map<std::string, double>;

// Numeric evaluation.  Unknown variables or calls throw ValidationError;
// powers with non-positive base and non-integer exponent throw too.
double evaluate(const NodePtr& n, const Env& env);

// Value and d/d(var) in one forward pass.
std::pair<double, double> evaluate_with_derivative(const NodePtr& n, const Env& env,
                                                   const std::string& var);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace prescurv::expr
