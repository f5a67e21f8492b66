#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hoplab/point_process.hpp"

namespace hoplab {

// Points of xi_L = xi intersected with [-L/2, L/2]; rates e^{-|x-y|^alpha}
// (beta = 0 throughout the finite-box analysis).
struct FiniteBox {
  Eigen::VectorXd positions;  // ascending, contains the origin
  double length = 0.0;        // L
  double alpha = 1.0;
};

FiniteBox restrict_to_box(const Environment& env, double length, double alpha);

// Maximal spacing between consecutive points in the box.
double zeta_max_gap(const FiniteBox& box);

// Markov generator: off-diagonal e^{-|x_i-x_j|^alpha}, zero row sums.
Eigen::MatrixXd generator_matrix(const FiniteBox& box);

enum class GapMethod { Auto, Dense, Iterative };

inline constexpr int kDenseGapLimit = 2000;

// Smallest nonzero eigenvalue of -L. Dense solve up to kDenseGapLimit
// points, shift-inverted inverse iteration with the constant vector
// deflated beyond.
double spectral_gap(const FiniteBox& box, GapMethod method = GapMethod::Auto);

struct CheegerCut {
  double value = 0.0;
  std::vector<int> subset;  // indices into box.positions
};

// Exact minimum of I_U over nonempty U with #U <= floor(#xi/2); exhaustive
// over subsets, feasible up to 22 points. Ties break to the
// lexicographically smallest subset.
CheegerCut cheeger_bruteforce(const FiniteBox& box);

struct IntervalCut {
  double value = 0.0;
  bool prefix = true;    // U = leftmost `count` points, else rightmost
  int count = 0;
  double cut_position = 0.0;  // midpoint of the crossed gap
};

// Minimum of I_U over interval cuts (all-left / all-right subsets); an upper
// bound on the Cheeger constant.
IntervalCut cheeger_interval_cut(const FiniteBox& box);

// I_U for an arbitrary subset (used by tests and the scan reports).
double isoperimetric_ratio(const FiniteBox& box, const std::vector<int>& subset);

}  // namespace hoplab
