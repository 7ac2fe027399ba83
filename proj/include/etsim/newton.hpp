#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "etsim/banded.hpp"

namespace etsim {

enum class Damping { None, Armijo };

struct NewtonOptions {
    double tol_residual = 1e-10;  // max-norm
    int max_iter = 25;
    Damping damping = Damping::Armijo;
    double backtrack_factor = 0.5;
    double min_step = 1.0 / 1024.0;
    // Converged once a full Newton update satisfies
    // |delta|_inf <= step_tol * (1 + |x|_inf), i.e. the iterate is resolved to
    // rounding. Covers residuals whose evaluation floor exceeds tol_residual.
    double step_tol = 1e-12;

    void validate() const;
};

struct NewtonReport {
    int iterations = 0;
    std::vector<double> residual_history;  // iterations + 1 entries
    bool converged = false;
    bool converged_on_step = false;  // stopped by step_tol rather than tol_residual
};

/// Newton failed to reach the residual tolerance, either after max_iter
/// iterations or because the backtracking line search stalled.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, NewtonReport report)
        : std::runtime_error(what), report_(std::move(report))
    {
    }
    [[nodiscard]] const NewtonReport& report() const noexcept { return report_; }

private:
    NewtonReport report_;
};

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;
using JacobianFn = std::function<BandedMatrix(const std::vector<double>&)>;

struct NewtonResult {
    std::vector<double> solution;
    NewtonReport report;
};

double max_norm(const std::vector<double>& v) noexcept;

/// Damped Newton iteration. With Armijo damping the step length is halved
/// while the trial residual max-norm fails to decrease; a step shorter than
/// min_step aborts with NoConvergence. An update below step_tol is applied
/// undamped and ends the iteration. SingularMatrixError from the linear
/// solve propagates unchanged.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          std::vector<double> guess, const NewtonOptions& opts);

}  // namespace etsim
