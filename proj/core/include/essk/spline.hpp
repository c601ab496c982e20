#pragma once

// Penalized cubic B-spline regression (P-splines) with the smoothing
// parameter chosen by generalized cross-validation.
//
// The roughness penalty uses divided differences of the coefficients taken
// over their Greville abscissae (normalized to unit mean spacing). For
// equally spaced knots this is the classical difference penalty; for the
// quantile knots used here it keeps the penalty null space equal to
// polynomials in x of degree < penalty_order, so a second-order penalty
// shrinks towards the least-squares straight line.

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "essk/distributions.hpp"

namespace essk {

std::vector<double> geometric_grid(double lo, double hi, int points);

struct SplineConfig {
  int n_interior_knots = 30;
  int penalty_order = 2;
  std::vector<double> lambda_grid = geometric_grid(1e-6, 1e6, 41);

  // Throws DomainError.
  void validate() const;
};

// Cubic B-spline basis on a clamped knot vector (boundary knots repeated
// four times).
class BSplineBasis {
 public:
  static constexpr int kDegree = 3;
  static constexpr int kOrder = kDegree + 1;

  // `interior` must be strictly increasing and strictly inside (lo, hi).
  BSplineBasis(double lo, double hi, std::vector<double> interior);

  // Interior knots at empirical quantiles of x, deduplicated; when x has
  // fewer than 10 distinct values the knots sit at the distinct values.
  static BSplineBasis from_data(std::span<const double> x, const SplineConfig& cfg);

  int dimension() const noexcept { return static_cast<int>(knots_.size()) - kOrder; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  double lower() const noexcept { return knots_.front(); }
  double upper() const noexcept { return knots_.back(); }

  // Writes the kOrder possibly-nonzero basis values at x and returns the
  // index of the first of them. Throws DomainError outside [lower, upper].
  int evaluate(double x, std::array<double, kOrder>& values) const;
  Vector evaluate_dense(double x) const;

  // Greville abscissae, one per basis function.
  std::vector<double> greville() const;

 private:
  std::vector<double> knots_;
};

// Sparse design matrix: row i has its nonzeros in columns
// first[i] .. first[i] + 3.
struct BasisMatrix {
  BSplineBasis basis;
  std::vector<int> first;
  std::vector<std::array<double, BSplineBasis::kOrder>> values;

  std::size_t rows() const noexcept { return first.size(); }
  int cols() const noexcept { return basis.dimension(); }
  Matrix dense() const;
};

// Throws DegenerateInputError when x is constant, non-finite, or has fewer
// than n_interior_knots + 4 points.
BasisMatrix build_basis(std::span<const double> x, const SplineConfig& cfg);

// penalty_order-th divided-difference operator, (dimension - order) x dimension.
Matrix penalty_matrix(const BSplineBasis& basis, int order);

struct SplineFitResult {
  std::vector<double> knots;  // full clamped knot vector
  Vector coefficients;
  double lambda = 0.0;
  double edf = 0.0;  // trace of the smoother matrix
  double rss = 0.0;
  double gcv_score = 0.0;
  Vector fitted;
};

SplineFitResult fit_penalized(std::span<const double> x, std::span<const double> y,
                              double lambda, const SplineConfig& cfg);

struct GcvPoint {
  double lambda;
  double rss;
  double edf;
  double gcv;
};

// GCV(lambda) = M * RSS / (M - edf)^2 for every grid value, ascending lambda.
std::vector<GcvPoint> gcv_path(std::span<const double> x, std::span<const double> y,
                               const SplineConfig& cfg);

// Grid value minimizing GCV; ties go to the larger lambda.
std::pair<double, SplineFitResult> select_lambda_gcv(std::span<const double> x,
                                                     std::span<const double> y,
                                                     const SplineConfig& cfg);

// Evaluates a fitted spline at new points inside the knot range.
Vector predict(const SplineFitResult& fit, std::span<const double> x);

}  // namespace essk
