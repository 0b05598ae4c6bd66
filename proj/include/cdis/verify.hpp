#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "cdis/grid.hpp"
#include "cdis/linalg.hpp"

namespace cdis {

/// FD residual of the coupled system on sampled q, r:
///   dx dt q + 2 (dx r) r = 0,   dx dt r - 2 (dx q) r = 0.
/// Reports the max over both equations.
ResidualReport check_cd_system(const FieldGrid<Complex>& q, const FieldGrid<Complex>& r,
                               double tolerance);

/// Pointwise sample of analytic x-derivatives for the circle invariant.
struct DerivSample {
    double dq_dx = 0.0;
    double dr_dx = 0.0;
    bool pole = false;
};

/// Max |(dq/dx)^2 + (dr/dx)^2 - 1| over the sample points. The derivatives
/// must come from the analytic evaluators, keeping this check independent of
/// the FD machinery.
ResidualReport check_circle_invariant(
    const std::function<DerivSample(double, double)>& derivs,
    const std::vector<std::pair<double, double>>& points, double tolerance);

/// FD residual of dx dt phi - 2 sin phi on an unwrapped phi grid.
ResidualReport check_sine_gordon(const FieldGrid<double>& phi, double tolerance);

/// Distance of phi to the nearest multiple of 2 pi along the x-boundary
/// columns. A constant phi = pi solves the equation but sits on a
/// non-vacuum background; this reports that without failing anything.
double sg_boundary_deviation(const FieldGrid<double>& phi);

/// Matrix sample for reduction checks; pole-tagged points are skipped.
struct ReductionSample {
    Matrix S;
    std::vector<Matrix> M;
    bool pole = false;
};

/// Max over the grid of ||S + S^dag||, |Tr S|, ||M_k + M_k^dag||, |Tr M_k|.
ResidualReport check_reduction(const std::function<ReductionSample(double, double)>& field,
                               const Grid& g, double tolerance);

/// Ratio of max norms under one halving of both spacings; second-order
/// residuals land near 4.
inline double refinement_ratio(const ResidualReport& coarse, const ResidualReport& fine) {
    return fine.max_norm > 0 ? coarse.max_norm / fine.max_norm
                             : std::numeric_limits<double>::infinity();
}

/// Assigns a truncation-aware tolerance to a fine-grid report: C h^2 with C
/// estimated from the coarsest (doubled-spacing) run, so the verdict demands
/// the second-order drop instead of an absolute magic number. An absolute
/// floor keeps exactly-zero residuals passing.
ResidualReport ch2_verdict(ResidualReport fine, double coarse_max, double safety = 1.6,
                           double floor_abs = 1e-10);

}  // namespace cdis
