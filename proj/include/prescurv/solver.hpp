#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "prescurv/assembly.hpp"
#include "prescurv/errors.hpp"

namespace prescurv {

struct NewtonConfig {
    int max_iterations = 30;
    double tolerance = 1e-10;  // residual sup norm
    double armijo_slope = 1e-4;
    int max_halvings = 30;
    // Accepted iterates keep min-eig(D^2 u~) at or above this fraction
    // of its value at the start of the solve.
    double convexity_floor = 0.1;
};

struct NewtonRecord {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;  // sup norms, initial included
};

// Damping exhausted or iteration budget spent; carries the last iterate.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& msg, DiscreteField last)
        : Error(msg), last_iterate(std::move(last)) {}
    DiscreteField last_iterate;
};

std::pair<DiscreteField, NewtonRecord> newton_solve(const StageProblem& prob,
                                                    const DiscreteField& initial,
                                                    const NewtonConfig& cfg);

// One accepted continuation step.
struct TStepRecord {
    std::string phase;  // which leg of the pipeline
    double t = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;       // final sup norm
    double convexity_min = 0.0;  // min-eig(D^2 u~) over interior
    double kappa_min = 0.0, kappa_max = 0.0;
    double u_min = 0.0, u_max = 0.0;
    double grad_max = 0.0;  // max |grad' u|
    double v_gap_min = 0.0;  // min (v - v_lower_bar) over nodes
    // Operator margin of the subsolution against the stage right side;
    // recorded on the deformation leg where strict positivity is asserted.
    double subsolution_margin = std::numeric_limits<double>::quiet_NaN();
};

// Empirical counterparts of the height, gradient, and curvature bounds.
struct MonitorReport {
    double c0 = 0.0;        // max(sup u, 1/(inf u - u_L))
    double c1 = 0.0;        // sup |grad' u|
    double k0 = 0.0;        // max(max kappa, 1/min kappa)
    double tau_min = 0.0;   // min support function
    double boundary_hessian_max = 0.0;  // max Frobenius |grad'^2 u| on the last interior ring
    double kappa_min = 0.0, kappa_max = 0.0;
    double u_min = 0.0, u_max = 0.0;
};

struct SolveReport {
    std::vector<TStepRecord> steps;
    bool success = false;
    std::string failure_reason;
    double failed_t = std::numeric_limits<double>::quiet_NaN();
    MonitorReport monitors;  // at the final field
    // Resolved homotopy constants (defaults filled in).
    double epsilon = 0.0;
    double delta1 = 0.0, delta2 = 0.0;  // deformation pipeline only
    int schedule_exponent = 0;          // T(t) = t^p, deformation pipeline only
    // Max abs difference between the auxiliary path's terminal residual
    // and the main path's initial residual on the shared field.
    double endpoint_consistency = std::numeric_limits<double>::quiet_NaN();
    // Worst interior operator margin of the supplied subsolution against
    // psi; small negative values (equality-case discretization error)
    // are noted rather than fatal.
    double subsolution_margin_min = std::numeric_limits<double>::quiet_NaN();
    std::string subsolution_note;
};

// Minimum step reached or an invariant failed mid-path; carries the
// partial report and the last good field.
class ContinuationError : public Error {
public:
    ContinuationError(const std::string& msg, SolveReport partial, DiscreteField last)
        : Error(msg), partial_report(std::move(partial)), last_field(std::move(last)) {}
    SolveReport partial_report;
    DiscreteField last_field;
};

enum class PathKind { Auto, Auxiliary68, Main69, Spherical71 };

struct HomotopyConfig {
    PathKind path = PathKind::Auto;
    // Unset constants are resolved from the subsolution and recorded in
    // the report.
    std::optional<double> epsilon;
    std::optional<double> delta1;
    std::optional<double> delta2;
    std::optional<int> schedule_exponent;
    double t_initial = 0.25;
    double t_min = 1e-6;
    NewtonConfig newton;
};

// psi(z, u) per interior node: returns (value, d/du).
using PsiFunction = std::function<std::pair<double, double>(int node, double u)>;

struct SolveInput {
    const ChartedDomain* domain = nullptr;
    int curvature_sign = 0;
    const CurvatureFunctionSpec* spec = nullptr;
    PsiFunction psi;
    Eigen::VectorXd boundary_values;     // u~ targets per node index
    Eigen::VectorXd subsolution_values;  // u~ per node index
};

std::pair<DiscreteField, SolveReport> continuation_run(const SolveInput& input,
                                                       const HomotopyConfig& cfg);

struct SubsolutionReport {
    Eigen::VectorXd margins;  // G[u] - psi(z, u), interior rows (zeros elsewhere)
    double min_margin = 0.0;
    int worst_node = -1;
    double convexity_min = 0.0;
    bool verdict = false;
    std::string note;
};

// Margin verdict against the given tolerance; the default accepts only
// strict discrete subsolutions, equality-case candidates need an
// explicit discretization allowance.
SubsolutionReport verify_subsolution(const ChartedDomain& dom, const SpaceFormModel& model,
                                     const CurvatureFunctionSpec& spec, const PsiFunction& psi,
                                     const DiscreteField& field,
                                     double margin_tolerance = -1e-10);

MonitorReport estimate_monitors(const ChartedDomain& dom, const SpaceFormModel& model,
                                const DiscreteField& field);

}  // namespace prescurv
