#pragma once

// Discrete-time LTI models: simulation, random stable generation and the
// model-based reference quantities (Markov parameters, H-infinity norm).
//
// Signals are stored one sample per column: an m-input sequence of length T
// is an m x T matrix.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddd/errors.hpp"
#include "ddd/linalg.hpp"

namespace ddd {

/// x(k+1) = A x(k) + B u(k),  y(k) = C x(k) + D u(k).
class StateSpaceModel {
 public:
  StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    if (a_.rows() != a_.cols()) throw DimensionError("A must be square");
    if (b_.rows() != a_.rows()) throw DimensionError("B must have n rows");
    if (c_.cols() != a_.rows()) throw DimensionError("C must have n columns");
    if (d_.rows() != c_.rows() || d_.cols() != b_.cols())
      throw DimensionError("D must be p x m");
    if (d_.rows() < 1 || d_.cols() < 1) throw DimensionError("model needs m >= 1 and p >= 1");
    if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !d_.allFinite())
      throw NumericalError("model matrices must be finite");
  }

  /// Memoryless y = D u, represented with a single zero state.
  static StateSpaceModel static_gain(const Matrix& d) {
    return {Matrix::Zero(1, 1), Matrix::Zero(1, d.cols()), Matrix::Zero(d.rows(), 1), d};
  }

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  Eigen::Index order() const { return a_.rows(); }
  Eigen::Index inputs() const { return b_.cols(); }
  Eigen::Index outputs() const { return c_.rows(); }

  double spectral_radius() const { return ddd::spectral_radius(a_); }
  bool stable() const { return spectral_radius() < 1.0; }

  friend bool operator==(const StateSpaceModel& l, const StateSpaceModel& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.c_ == r.c_ && l.d_ == r.d_;
  }

 private:
  Matrix a_, b_, c_, d_;
};

/// SISO difference equation
///   sum_i a_i y(k+i) = sum_j b_j u(k+j),  a_q = 1,  deg b <= q.
struct DifferenceEquationModel {
  std::vector<double> output_coeffs;  // a_0 .. a_q
  std::vector<double> input_coeffs;   // b_0 .. b_r

  /// Controllable canonical realization.
  StateSpaceModel to_state_space() const {
    if (output_coeffs.size() < 2) throw DimensionError("difference equation needs order >= 1");
    const auto q = static_cast<Eigen::Index>(output_coeffs.size()) - 1;
    const double lead = output_coeffs.back();
    if (lead == 0.0) throw DimensionError("leading output coefficient must be nonzero");
    if (input_coeffs.empty() || static_cast<Eigen::Index>(input_coeffs.size()) > q + 1)
      throw DimensionError("input polynomial degree must not exceed output degree");

    std::vector<double> a(output_coeffs.size()), b(static_cast<std::size_t>(q) + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = output_coeffs[i] / lead;
    for (std::size_t j = 0; j < input_coeffs.size(); ++j) b[j] = input_coeffs[j] / lead;

    Matrix am = Matrix::Zero(q, q);
    for (Eigen::Index i = 0; i + 1 < q; ++i) am(i, i + 1) = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) am(q - 1, j) = -a[static_cast<std::size_t>(j)];
    Matrix bm = Matrix::Zero(q, 1);
    bm(q - 1, 0) = 1.0;
    const double d = b[static_cast<std::size_t>(q)];
    Matrix cm(1, q);
    for (Eigen::Index j = 0; j < q; ++j)
      cm(0, j) = b[static_cast<std::size_t>(j)] - d * a[static_cast<std::size_t>(j)];
    return {am, bm, cm, Matrix::Constant(1, 1, d)};
  }
};

/// Output sequence (p x T) for input `u` (m x T) and initial state `x0`.
inline Matrix simulate(const StateSpaceModel& model, const Matrix& u, const Vector& x0) {
  if (u.rows() != model.inputs()) throw DimensionError("input samples must have dimension m");
  if (x0.size() != model.order()) throw DimensionError("initial state must have dimension n");
  Matrix y(model.outputs(), u.cols());
  Vector x = x0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    y.col(k).noalias() = model.C() * x + model.D() * u.col(k);
    x = model.A() * x + model.B() * u.col(k);
  }
  return y;
}

inline Matrix simulate(const StateSpaceModel& model, const Matrix& u) {
  return simulate(model, u, Vector::Zero(model.order()));
}

/// M_0 = D, M_k = C A^{k-1} B.
inline std::vector<Matrix> markov_parameters(const StateSpaceModel& model, Eigen::Index count) {
  if (count < 1) throw DimensionError("markov_parameters needs count >= 1");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  out.push_back(model.D());
  Matrix ak_b = model.B();
  for (Eigen::Index k = 1; k < count; ++k) {
    out.push_back(model.C() * ak_b);
    ak_b = model.A() * ak_b;
  }
  return out;
}

/// Frequency response D + C (e^{i theta} I - A)^{-1} B.
inline Eigen::MatrixXcd frequency_response(const StateSpaceModel& model, double theta) {
  using Complex = std::complex<double>;
  Eigen::MatrixXcd zi_minus_a = -model.A().cast<Complex>();
  zi_minus_a.diagonal().array() += std::polar(1.0, theta);
  Eigen::MatrixXcd x = zi_minus_a.partialPivLu().solve(model.B().cast<Complex>());
  return model.D().cast<Complex>() + model.C().cast<Complex>() * x;
}

inline double largest_singular_value(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

namespace detail {

inline double gain_at(const StateSpaceModel& model, double theta) {
  return largest_singular_value(frequency_response(model, theta));
}

// Golden-section search for the maximum of `gain_at` on [lo, hi].
inline double golden_max(const StateSpaceModel& model, double lo, double hi, double width_tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = gain_at(model, x1), f2 = gain_at(model, x2);
  double best = std::max({gain_at(model, lo), gain_at(model, hi), f1, f2});
  while (hi - lo > width_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = gain_at(model, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = gain_at(model, x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace detail

/// H-infinity norm of a stable model: uniform grid of 4096 frequencies on
/// [0, pi], then golden-section refinement around the three best grid points.
inline double hinf_norm(const StateSpaceModel& model, double rel_tol = 1e-6) {
  if (!(rel_tol > 0.0)) throw DimensionError("hinf_norm needs rel_tol > 0");
  if (!model.stable()) throw NumericalError("hinf_norm requires a stable model");
  constexpr int kGrid = 4096;
  const double step = std::numbers::pi / (kGrid - 1);
  std::vector<std::pair<double, int>> grid;
  grid.reserve(kGrid);
  for (int i = 0; i < kGrid; ++i) grid.emplace_back(detail::gain_at(model, i * step), i);
  std::partial_sort(grid.begin(), grid.begin() + 3, grid.end(),
                    [](const auto& l, const auto& r) { return l.first > r.first; });
  double best = grid.front().first;
  for (int k = 0; k < 3; ++k) {
    const int i = grid[static_cast<std::size_t>(k)].second;
    const double lo = std::max(0, i - 1) * step;
    const double hi = std::min(kGrid - 1, i + 1) * step;
    best = std::max(best, detail::golden_max(model, lo, hi, rel_tol));
  }
  return best;
}

/// Random stable model: standard-normal A, B, C, D with A rescaled so that
/// its spectral radius is drawn uniformly from `radius_range`.
inline StateSpaceModel random_stable_model(Eigen::Index n, Eigen::Index m, Eigen::Index p,
                                           std::uint64_t seed,
                                           std::pair<double, double> radius_range) {
  const auto [lo, hi] = radius_range;
  if (!(lo > 0.0 && lo <= hi && hi < 1.0))
    throw DimensionError("radius range must satisfy 0 < lo <= hi < 1");
  if (n < 1 || m < 1 || p < 1) throw DimensionError("model dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index r, Eigen::Index c) {
    Matrix x(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) x(i, j) = normal(rng);
    return x;
  };
  Matrix a = draw(n, n);
  double rho = spectral_radius(a);
  while (rho < 1e-12) {
    a = draw(n, n);
    rho = spectral_radius(a);
  }
  std::uniform_real_distribution<double> radius(lo, hi);
  const double target = lo == hi ? lo : radius(rng);
  a *= target / rho;
  Matrix b = draw(n, m), c = draw(p, n), d = draw(p, m);
  return {a, b, c, d};
}

/// i.i.d. normal input sequence (m x length).
inline Matrix random_input(Eigen::Index m, Eigen::Index length, double stddev,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix u(m, length);
  for (Eigen::Index k = 0; k < length; ++k)
    for (Eigen::Index i = 0; i < m; ++i) u(i, k) = normal(rng);
  return u;
}

}  // namespace ddd
