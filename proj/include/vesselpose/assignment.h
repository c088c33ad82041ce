#pragma once

#include <vector>

#include <Eigen/Core>

namespace vesselpose {

// Minimum-cost assignment on a rectangular cost matrix (Hungarian method with
// potentials, O(n^2 m)). Returns, for each row, the assigned column or -1.
// Exactly min(rows, cols) rows are assigned. Costs must be finite.
std::vector<int> SolveAssignment(const Eigen::MatrixXd& cost);

}  // namespace vesselpose
