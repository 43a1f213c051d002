#ifndef AIRA_STABILITY_HPP
#define AIRA_STABILITY_HPP

#include <Eigen/Eigenvalues>

#include "aira/model.hpp"

namespace aira {

struct StabilityReport {
    bool stable = false;
    double spectral_radius = 0.0;
};

/// Largest companion-matrix eigenvalue modulus; stable when it is below
/// 1 - 1e-9.
inline StabilityReport check_stability(const VarModel& model) {
    const CompanionView companion(model);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion.matrix, /*computeEigenvectors=*/false);
    double radius = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        radius = std::max(radius, std::abs(solver.eigenvalues()(i)));
    return {radius < 1.0 - 1e-9, radius};
}

} // namespace aira

#endif // AIRA_STABILITY_HPP
