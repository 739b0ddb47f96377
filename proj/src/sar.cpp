#include "spatialreg/sar.hpp"
#include "spatialreg/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

namespace spatialreg {

Vector solve_simultaneous_lag(const SpatialWeights& w, double rho, const Vector& rhs) {
    if (!(std::fabs(rho) < 1.0))
        throw Error("solve_simultaneous_lag: |rho| = " + std::to_string(std::fabs(rho)) +
                    " >= 1, system undefined");
    if (static_cast<std::size_t>(rhs.size()) != w.n)
        throw Error("solve_simultaneous_lag: right-hand side length does not match weights");
    if (rho == 0.0) return rhs;

    const auto n = static_cast<Eigen::Index>(w.n);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(w.nonzero_links() + w.n);
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
    for (std::size_t i = 0; i < w.n; ++i)
        for (const auto& link : w.neighbors[i])
            triplets.emplace_back(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(link.index), -rho * link.weight);
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success)
        throw Error("solve_simultaneous_lag: factorization failed");
    Vector out = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw Error("solve_simultaneous_lag: solve failed");
    return out;
}

} // namespace spatialreg
