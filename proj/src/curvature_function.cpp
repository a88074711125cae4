#include "prescurv/curvature_function.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "prescurv/errors.hpp"

namespace prescurv {

namespace {

using expr::Kind;
using expr::Node;
using expr::NodePtr;

// e_0..e_n of lambda and all gradients d e_k / d lambda_i = e_{k-1}(lambda
// with i removed), by the coefficient recurrence of prod (x + lambda_i).
struct SigmaTable {
    Eigen::VectorXd values;  // size n+1
    Eigen::MatrixXd grads;   // (n+1) x n
};

Eigen::VectorXd sigma_values(const Eigen::VectorXd& lambda) {
    const int n = static_cast<int>(lambda.size());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(n, i + 1); j >= 1; --j) c[j] += lambda[i] * c[j - 1];
    return c;
}

SigmaTable sigma_table(const Eigen::VectorXd& lambda) {
    const int n = static_cast<int>(lambda.size());
    SigmaTable t;
    t.values = sigma_values(lambda);
    t.grads = Eigen::MatrixXd::Zero(n + 1, n);
    for (int skip = 0; skip < n; ++skip) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
        c[0] = 1.0;
        int used = 0;
        for (int i = 0; i < n; ++i) {
            if (i == skip) continue;
            for (int j = std::min(n - 1, used + 1); j >= 1; --j) c[j] += lambda[i] * c[j - 1];
            ++used;
        }
        for (int k = 1; k <= n; ++k) t.grads(k, skip) = c[k - 1];
    }
    return t;
}

bool is_constant(const NodePtr& node) {
    switch (node->kind) {
        case Kind::Number: return true;
        case Kind::Variable: return false;
        case Kind::Call: return false;
        case Kind::Negate: return is_constant(node->args[0]);
        case Kind::Binary: return is_constant(node->args[0]) && is_constant(node->args[1]);
    }
    return false;
}

double constant_value(const NodePtr& node) {
    return expr::evaluate(node, {});
}

NodePtr substitute_dimension(const NodePtr& node, int n) {
    switch (node->kind) {
        case Kind::Number: return node;
        case Kind::Variable:
            if (node->name == "n") return expr::number(static_cast<double>(n));
            throw ValidationError("curvature functions may not reference variable '" +
                                  node->name + "'");
        case Kind::Call: {
            if (node->name != "sigma")
                throw ValidationError("curvature functions support only sigma(k), not '" +
                                      node->name + "'");
            if (node->args.size() != 1) throw ValidationError("sigma takes one argument");
            return expr::call("sigma", {substitute_dimension(node->args[0], n)});
        }
        case Kind::Negate: return expr::negate(substitute_dimension(node->args[0], n));
        case Kind::Binary:
            return expr::binary(node->op, substitute_dimension(node->args[0], n),
                                substitute_dimension(node->args[1], n));
    }
    throw ValidationError("corrupt expression node");
}

int sigma_index(const NodePtr& call_node, int n) {
    if (!is_constant(call_node->args[0]))
        throw ValidationError("sigma argument must be a constant");
    const double kd = constant_value(call_node->args[0]);
    const int k = static_cast<int>(std::lround(kd));
    if (std::abs(kd - k) > 1e-9 || k < 1 || k > n)
        throw ValidationError("sigma index must be an integer in [1, n]");
    return k;
}

double checked_power(double base, double exponent) {
    if (base > 0.0) return std::pow(base, exponent);
    if (base == 0.0 && exponent > 0.0) return 0.0;
    throw ValidationError("curvature function power applied to non-positive base");
}

double eval_value(const NodePtr& node, const Eigen::VectorXd& sig, int n) {
    switch (node->kind) {
        case Kind::Number: return node->number;
        case Kind::Variable: throw ValidationError("unexpected variable in curvature function");
        case Kind::Call: return sig[sigma_index(node, n)];
        case Kind::Negate: return -eval_value(node->args[0], sig, n);
        case Kind::Binary: {
            if (node->op == '^') {
                const double b = eval_value(node->args[0], sig, n);
                return checked_power(b, constant_value(node->args[1]));
            }
            const double a = eval_value(node->args[0], sig, n);
            const double b = eval_value(node->args[1], sig, n);
            switch (node->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
            }
            throw ValidationError("unknown operator");
        }
    }
    throw ValidationError("corrupt expression node");
}

struct ValGrad {
    double v;
    Eigen::VectorXd g;
};

ValGrad eval_valgrad(const NodePtr& node, const SigmaTable& t, int n) {
    switch (node->kind) {
        case Kind::Number: return {node->number, Eigen::VectorXd::Zero(n)};
        case Kind::Variable: throw ValidationError("unexpected variable in curvature function");
        case Kind::Call: {
            const int k = sigma_index(node, n);
            return {t.values[k], t.grads.row(k).transpose()};
        }
        case Kind::Negate: {
            ValGrad c = eval_valgrad(node->args[0], t, n);
            return {-c.v, -c.g};
        }
        case Kind::Binary: {
            if (node->op == '^') {
                ValGrad b = eval_valgrad(node->args[0], t, n);
                const double alpha = constant_value(node->args[1]);
                const double v = checked_power(b.v, alpha);
                return {v, alpha * checked_power(b.v, alpha - 1.0) * b.g};
            }
            ValGrad a = eval_valgrad(node->args[0], t, n);
            ValGrad b = eval_valgrad(node->args[1], t, n);
            switch (node->op) {
                case '+': return {a.v + b.v, a.g + b.g};
                case '-': return {a.v - b.v, a.g - b.g};
                case '*': return {a.v * b.v, a.g * b.v + a.v * b.g};
                case '/': return {a.v / b.v, (a.g * b.v - a.v * b.g) / (b.v * b.v)};
            }
            throw ValidationError("unknown operator");
        }
    }
    throw ValidationError("corrupt expression node");
}

std::optional<double> homogeneity_degree(const NodePtr& node, int n) {
    switch (node->kind) {
        case Kind::Number: return 0.0;
        case Kind::Variable: return std::nullopt;
        case Kind::Call: return static_cast<double>(sigma_index(node, n));
        case Kind::Negate: return homogeneity_degree(node->args[0], n);
        case Kind::Binary: {
            if (node->op == '^') {
                auto base = homogeneity_degree(node->args[0], n);
                if (!base) return std::nullopt;
                return *base * constant_value(node->args[1]);
            }
            auto a = homogeneity_degree(node->args[0], n);
            auto b = homogeneity_degree(node->args[1], n);
            if (!a || !b) return std::nullopt;
            switch (node->op) {
                case '+':
                case '-': return *a == *b ? a : std::nullopt;
                case '*': return *a + *b;
                case '/': return *a - *b;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// Whether the value provably tends to zero as some lambda_i -> 0; true
// exactly when an S_n factor survives the algebra.
bool boundary_vanishing(const NodePtr& node, int n) {
    switch (node->kind) {
        case Kind::Number: return false;
        case Kind::Variable: return false;
        case Kind::Call: return sigma_index(node, n) == n;
        case Kind::Negate: return boundary_vanishing(node->args[0], n);
        case Kind::Binary: {
            const bool a = boundary_vanishing(node->args[0], n);
            const bool b = boundary_vanishing(node->args[1], n);
            switch (node->op) {
                case '+':
                case '-': return a && b;
                case '*': return a || b;
                case '/': return a && !b;
                case '^': return a && constant_value(node->args[1]) > 0.0;
            }
            return false;
        }
    }
    return false;
}

void check_cone(const Eigen::VectorXd& lambda, int n) {
    if (static_cast<int>(lambda.size()) != n)
        throw ValidationError("lambda dimension disagrees with the curvature function");
    for (int i = 0; i < n; ++i)
        if (!(lambda[i] > 0.0))
            throw ConeViolationError("lambda outside the positive cone (component " +
                                     std::to_string(i) + " = " + expr::format_double(lambda[i]) +
                                     ")");
}

}  // namespace

CurvatureFunctionSpec parse_curvature_function(const std::string& text, int dimension) {
    if (dimension < 2) throw ValidationError("curvature function dimension must be >= 2");
    CurvatureFunctionSpec spec;
    spec.dimension = dimension;
    NodePtr raw = expr::parse(text);
    spec.source_text = expr::serialize(raw);
    spec.tree = substitute_dimension(raw, dimension);
    // Validate sigma indices and exponent constness eagerly.
    spec.homogeneous_degree = homogeneity_degree(spec.tree, dimension);
    spec.vanishes_on_boundary = boundary_vanishing(spec.tree, dimension);
    const double at_ones =
        eval_value(spec.tree, sigma_values(Eigen::VectorXd::Ones(dimension)), dimension);
    if (!std::isfinite(at_ones) || !(at_ones > 0.0))
        throw ValidationError("curvature function must be finite and positive at (1,...,1)");
    return spec;
}

double eval_f(const CurvatureFunctionSpec& spec, const Eigen::VectorXd& lambda) {
    check_cone(lambda, spec.dimension);
    return eval_value(spec.tree, sigma_values(lambda), spec.dimension);
}

Eigen::VectorXd grad_f(const CurvatureFunctionSpec& spec, const Eigen::VectorXd& lambda) {
    check_cone(lambda, spec.dimension);
    return eval_valgrad(spec.tree, sigma_table(lambda), spec.dimension).g;
}

namespace {

// FD Hessian of f with per-coordinate relative steps and one Richardson
// pass; the witness must resolve eigenvalues near zero against roundoff.
Eigen::MatrixXd fd_hessian(const CurvatureFunctionSpec& spec, const Eigen::VectorXd& lambda,
                           double h_rel) {
    const int n = spec.dimension;
    auto hess_at = [&](double scale) {
        Eigen::MatrixXd h(n, n);
        const double f0 = eval_f(spec, lambda);
        Eigen::VectorXd step = h_rel * scale * lambda;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd lp = lambda, lm = lambda;
            lp[i] += step[i];
            lm[i] -= step[i];
            h(i, i) = (eval_f(spec, lp) - 2.0 * f0 + eval_f(spec, lm)) / (step[i] * step[i]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Eigen::VectorXd pp = lambda, pm = lambda, mp = lambda, mm = lambda;
                pp[i] += step[i]; pp[j] += step[j];
                pm[i] += step[i]; pm[j] -= step[j];
                mp[i] -= step[i]; mp[j] += step[j];
                mm[i] -= step[i]; mm[j] -= step[j];
                h(i, j) = h(j, i) = (eval_f(spec, pp) - eval_f(spec, pm) - eval_f(spec, mp) +
                                     eval_f(spec, mm)) /
                                    (4.0 * step[i] * step[j]);
            }
        return h;
    };
    const Eigen::MatrixXd coarse = hess_at(1.0);
    const Eigen::MatrixXd fine = hess_at(0.5);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

StructureReport check_structure_conditions(const CurvatureFunctionSpec& spec, int sample_count,
                                           double psi0, double psi1, std::uint64_t seed) {
    if (sample_count < 1) throw ValidationError("sample_count must be >= 1");
    if (!(0.0 < psi0 && psi0 < psi1))
        throw ValidationError("need 0 < psi0 < psi1 for the structure check");
    const int n = spec.dimension;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_range(std::log(0.05), std::log(20.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    StructureReport rep;
    rep.sigma0_empirical = std::numeric_limits<double>::infinity();
    rep.concavity_max_eigenvalue = -std::numeric_limits<double>::infinity();

    const bool rescalable = spec.homogeneous_degree && *spec.homogeneous_degree > 0.0;
    const long max_tries = 50L * sample_count;
    long tries = 0;
    while (rep.accepted_samples < sample_count && tries < max_tries) {
        ++tries;
        Eigen::VectorXd lambda(n);
        for (int i = 0; i < n; ++i) lambda[i] = std::exp(log_range(rng));
        double f;
        try {
            f = eval_f(spec, lambda);
        } catch (const ConeViolationError&) {
            ++rep.rejected_samples;
            continue;
        }
        if (rescalable) {
            // Stratified f-levels covering [psi0, psi1], the first one
            // exactly at psi0 so the empirical bound touches the floor.
            const double target =
                sample_count == 1
                    ? psi0
                    : psi0 + (psi1 - psi0) * (static_cast<double>(rep.accepted_samples) /
                                              (sample_count - 1));
            lambda *= std::pow(target / f, 1.0 / *spec.homogeneous_degree);
            f = target;
        } else if (f < psi0 || f > psi1) {
            ++rep.rejected_samples;
            continue;
        }
        const Eigen::VectorXd g = grad_f(spec, lambda);
        rep.sigma0_empirical = std::min(rep.sigma0_empirical, g.dot(lambda));
        // Congruence by diag(lambda) and division by f preserve the sign
        // of the Hessian while making the FD noise floor uniform over
        // samples with widely spread components.
        const Eigen::MatrixXd scaled = lambda.asDiagonal() *
                                       fd_hessian(spec, lambda, 1e-3) * lambda.asDiagonal() / f;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
        rep.concavity_max_eigenvalue =
            std::max(rep.concavity_max_eigenvalue, es.eigenvalues().maxCoeff());
        ++rep.accepted_samples;
    }

    // Growth condition: on a fixed compact box, search for R with
    // f(lambda_1, ..., lambda_{n-1}, lambda_n + R) >= C for a C well
    // above the box values; a pure quotient stays bounded and fails.
    rep.growth_target = 10.0 * psi1;
    std::vector<Eigen::VectorXd> box;
    for (int s = 0; s < 64; ++s) {
        Eigen::VectorXd lambda(n);
        for (int i = 0; i < n; ++i) lambda[i] = 1.0 + unit(rng);
        box.push_back(lambda);
    }
    for (int j = 0; j <= 30 && !rep.growth_satisfied; ++j) {
        const double r = std::ldexp(1.0, j);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& lambda : box) {
            Eigen::VectorXd shifted = lambda;
            shifted[n - 1] += r;
            worst = std::min(worst, eval_f(spec, shifted));
        }
        if (worst >= rep.growth_target) {
            rep.growth_satisfied = true;
            rep.growth_r = r;
        }
    }
    return rep;
}

}  // namespace prescurv
