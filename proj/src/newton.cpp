#include "etsim/newton.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <string>

namespace etsim {

void NewtonOptions::validate() const
{
    if (!(tol_residual > 0.0)) {
        throw std::invalid_argument("newton tolerance must be positive");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("newton max_iter must be at least 1");
    }
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw std::invalid_argument("newton backtrack factor must lie in (0, 1)");
    }
    if (!(min_step > 0.0 && min_step <= 1.0)) {
        throw std::invalid_argument("newton min_step must lie in (0, 1]");
    }
    if (!(step_tol >= 0.0)) {
        throw std::invalid_argument("newton step_tol must be non-negative");
    }
}

double max_norm(const std::vector<double>& v) noexcept
{
    double norm = 0.0;
    for (double value : v) {
        if (!std::isfinite(value)) {
            return INFINITY;
        }
        norm = std::max(norm, std::abs(value));
    }
    return norm;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian,
                          std::vector<double> guess, const NewtonOptions& opts)
{
    NewtonReport report;
    std::vector<double> x = std::move(guess);
    std::vector<double> f = residual(x);
    double norm = max_norm(f);
    report.residual_history.push_back(norm);

    while (!(norm <= opts.tol_residual)) {
        if (report.iterations >= opts.max_iter) {
            throw NoConvergence("newton: residual " + std::to_string(norm) + " above tolerance after " +
                                    std::to_string(report.iterations) + " iterations",
                                report);
        }
        if (!std::isfinite(norm)) {
            throw NoConvergence("newton: non-finite residual", report);
        }

        for (double& value : f) {
            value = -value;
        }
        const std::vector<double> delta = banded_solve(jacobian(x), std::move(f));

        if (max_norm(delta) <= opts.step_tol * (1.0 + max_norm(x))) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] += delta[i];
            }
            ++report.iterations;
            report.residual_history.push_back(max_norm(residual(x)));
            report.converged = true;
            report.converged_on_step = true;
            return {std::move(x), std::move(report)};
        }

        double step = 1.0;
        std::vector<double> trial(x.size());
        std::vector<double> f_trial;
        double trial_norm = INFINITY;
        while (true) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                trial[i] = x[i] + step * delta[i];
            }
            f_trial = residual(trial);
            trial_norm = max_norm(f_trial);
            if (opts.damping == Damping::None || trial_norm < norm) {
                break;
            }
            step *= opts.backtrack_factor;
            if (step < opts.min_step) {
                throw NoConvergence("newton: line search stalled at residual " + std::to_string(norm),
                                    report);
            }
        }

        x.swap(trial);
        f.swap(f_trial);
        norm = trial_norm;
        ++report.iterations;
        report.residual_history.push_back(norm);
    }

    report.converged = true;
    return {std::move(x), std::move(report)};
}

}  // namespace etsim
