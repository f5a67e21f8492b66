#include "hoplab/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "hoplab/finite_volume.hpp"  // SolverError

namespace hoplab {

FiniteBox restrict_to_box(const Environment& env, double length, double alpha) {
  if (!(length > 0)) throw std::invalid_argument("box length must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("box alpha must be positive");
  if (env.covered_right() < length / 2 || env.covered_left() > -length / 2)
    throw std::invalid_argument("environment does not cover the requested box");

  std::vector<double> pts;
  for (int k = env.min_index(); k <= env.max_index(); ++k) {
    const double x = env.position(k);
    if (std::abs(x) <= length / 2) pts.push_back(x);
  }
  FiniteBox box;
  box.positions = Eigen::Map<const Eigen::VectorXd>(pts.data(), static_cast<long>(pts.size()));
  box.length = length;
  box.alpha = alpha;
  return box;
}

double zeta_max_gap(const FiniteBox& box) {
  const long n = box.positions.size();
  if (n < 2) throw std::invalid_argument("zeta needs at least 2 points");
  return (box.positions.tail(n - 1) - box.positions.head(n - 1)).maxCoeff();
}

Eigen::MatrixXd generator_matrix(const FiniteBox& box) {
  const long n = box.positions.size();
  if (n < 2) throw std::invalid_argument("generator needs at least 2 points");
  Eigen::MatrixXd gen(n, n);
  for (long i = 0; i < n; ++i) {
    gen(i, i) = 0.0;
    for (long j = i + 1; j < n; ++j) {
      const double w = std::exp(-std::pow(box.positions(j) - box.positions(i), box.alpha));
      gen(i, j) = gen(j, i) = w;
    }
  }
  gen.diagonal() = -gen.rowwise().sum();
  return gen;
}

namespace {

double gap_dense(const Eigen::MatrixXd& neg_gen) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(neg_gen, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  return solver.eigenvalues()(1);  // eigenvalue 0 has multiplicity one
}

double gap_iterative(const Eigen::MatrixXd& neg_gen) {
  const long n = neg_gen.rows();
  // Move the constant-vector nullspace up by sigma, factor once, then run
  // inverse iteration restricted to the mean-zero subspace.
  const double sigma = 2.0 * neg_gen.diagonal().maxCoeff() + 1.0;
  Eigen::MatrixXd shifted = neg_gen;
  shifted.array() += sigma / static_cast<double>(n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("shifted LDLT failed");

  Rng rng(0x5eedf00dULL);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
  v.array() -= v.mean();
  v.normalize();

  double theta = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = ldlt.solve(v);
    w.array() -= w.mean();
    w.normalize();
    const Eigen::VectorXd aw = neg_gen * w;
    theta = w.dot(aw);
    const double resid = (aw - theta * w).norm();
    v = w;
    if (resid <= 1e-8 * std::max(theta, 1e-300)) return theta;
  }
  throw SolverError("inverse iteration did not converge");
}

}  // namespace

double spectral_gap(const FiniteBox& box, GapMethod method) {
  const long n = box.positions.size();
  if (n < 2) throw std::invalid_argument("spectral gap needs at least 2 points");
  const Eigen::MatrixXd neg_gen = -generator_matrix(box);
  if (method == GapMethod::Auto)
    method = n <= kDenseGapLimit ? GapMethod::Dense : GapMethod::Iterative;
  return method == GapMethod::Dense ? gap_dense(neg_gen) : gap_iterative(neg_gen);
}

double isoperimetric_ratio(const FiniteBox& box, const std::vector<int>& subset) {
  const long n = box.positions.size();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int i : subset) in[static_cast<std::size_t>(i)] = 1;
  double cut = 0.0;
  for (int i : subset)
    for (long j = 0; j < n; ++j)
      if (!in[static_cast<std::size_t>(j)])
        cut += std::exp(-std::pow(std::abs(box.positions(j) - box.positions(i)), box.alpha));
  return cut / static_cast<double>(subset.size());
}

CheegerCut cheeger_bruteforce(const FiniteBox& box) {
  const int n = static_cast<int>(box.positions.size());
  if (n < 2) throw std::invalid_argument("cheeger needs at least 2 points");
  if (n > 22) throw std::invalid_argument("brute-force cheeger capped at 22 points");

  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j)
      w(i, j) = w(j, i) =
          std::exp(-std::pow(box.positions(j) - box.positions(i), box.alpha));
  }
  const Eigen::VectorXd row_total = w.rowwise().sum();

  const std::uint32_t total = 1u << n;
  std::vector<double> cut(total, 0.0);
  const int max_size = n / 2;

  auto lex_less = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  auto indices_of = [n](std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) out.push_back(i);
    return out;
  };

  CheegerCut best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    const std::uint32_t low = mask & (~mask + 1u);
    const std::uint32_t rest = mask ^ low;
    const int i = std::countr_zero(low);
    double win = 0.0;
    for (std::uint32_t r = rest; r != 0;) {
      const std::uint32_t lb = r & (~r + 1u);
      win += w(i, std::countr_zero(lb));
      r ^= lb;
    }
    cut[mask] = cut[rest] + row_total(i) - 2.0 * win;

    const int size = std::popcount(mask);
    if (size > max_size) continue;
    const double ratio = cut[mask] / size;
    if (ratio < best.value) {
      best.value = ratio;
      best.subset = indices_of(mask);
    } else if (ratio == best.value) {
      auto cand = indices_of(mask);
      if (lex_less(cand, best.subset)) best.subset = std::move(cand);
    }
  }
  return best;
}

IntervalCut cheeger_interval_cut(const FiniteBox& box) {
  const int n = static_cast<int>(box.positions.size());
  if (n < 2) throw std::invalid_argument("cheeger needs at least 2 points");

  // cut(k) = boundary mass of the first k points; built incrementally.
  std::vector<double> cut(static_cast<std::size_t>(n), 0.0);
  double acc = 0.0;
  for (int p = 0; p < n - 1; ++p) {
    for (int j = p + 1; j < n; ++j)
      acc += std::exp(-std::pow(box.positions(j) - box.positions(p), box.alpha));
    for (int i = 0; i < p; ++i)
      acc -= std::exp(-std::pow(box.positions(p) - box.positions(i), box.alpha));
    cut[static_cast<std::size_t>(p + 1)] = acc;  // U = {0..p}, size p+1
  }

  IntervalCut best;
  best.value = std::numeric_limits<double>::infinity();
  const int max_size = n / 2;
  for (int k = 1; k <= max_size; ++k) {
    const double prefix_ratio = cut[static_cast<std::size_t>(k)] / k;
    if (prefix_ratio < best.value) {
      best = {prefix_ratio, true, k,
              0.5 * (box.positions(k - 1) + box.positions(k))};
    }
    const double suffix_ratio = cut[static_cast<std::size_t>(n - k)] / k;
    if (suffix_ratio < best.value) {
      best = {suffix_ratio, false, k,
              0.5 * (box.positions(n - k - 1) + box.positions(n - k))};
    }
  }
  return best;
}

}  // namespace hoplab
