#include "essk/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "essk/errors.hpp"

namespace essk {
namespace {

constexpr int kFallbackDistinct = 10;
constexpr double kTieTolerance = 1e-12;

// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_xy(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spline: x and y lengths differ");
  for (double v : y) {
    if (!std::isfinite(v)) throw DegenerateInputError("spline: non-finite response");
  }
}

// Least-squares state for one (x, y) pair, reused across lambda values:
// B = Q [R; 0] so that ||y - Bc||^2 = rss0 + ||z - Rc||^2.
class PenalizedSystem {
 public:
  PenalizedSystem(std::span<const double> x, std::span<const double> y, const SplineConfig& cfg)
      : design_(build_basis(x, cfg)),
        penalty_(penalty_matrix(design_.basis, cfg.penalty_order)) {
    check_xy(x, y);
    const int p = design_.cols();
    r_ = Matrix::Zero(p, p);
    z_ = Vector::Zero(p);
    Vector work(p);
    for (std::size_t i = 0; i < design_.rows(); ++i) {
      work.setZero();
      const int f = design_.first[i];
      for (int k = 0; k < BSplineBasis::kOrder; ++k) work[f + k] = design_.values[i][k];
      absorb_row(work, y[i], f);
    }
  }

  const BasisMatrix& design() const noexcept { return design_; }
  std::size_t rows() const noexcept { return design_.rows(); }

  struct Solution {
    Vector coefficients;
    double rss;
    double edf;
  };

  Solution solve(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw DomainError("spline: lambda must be positive and finite");
    }
    const Eigen::Index p = r_.cols();
    const Eigen::Index q = penalty_.rows();
    // Large lambda makes this a stiff least-squares problem. Householder QR
    // stays accurate if the heavy rows come first and columns are pivoted.
    const bool penalty_first = lambda * penalty_.cwiseAbs2().rowwise().sum().maxCoeff() >
                               r_.cwiseAbs2().rowwise().sum().maxCoeff();
    Matrix augmented(p + q, p);
    Vector rhs = Vector::Zero(p + q);
    if (penalty_first) {
      augmented.topRows(q) = std::sqrt(lambda) * penalty_;
      augmented.bottomRows(p) = r_;
      rhs.tail(p) = z_;
    } else {
      augmented.topRows(p) = r_;
      augmented.bottomRows(q) = std::sqrt(lambda) * penalty_;
      rhs.head(p) = z_;
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(augmented);
    Solution s;
    s.coefficients = qr.solve(rhs);
    s.rss = rss0_ + (z_ - r_ * s.coefficients).squaredNorm();
    // tr(B (B'B + lambda D'D)^-1 B') = ||R P Rt^-1||_F^2 where A P = Q Rt is
    // the pivoted factorization of the augmented matrix A.
    const Matrix rt = qr.matrixR().topRows(p).triangularView<Eigen::Upper>();
    const Matrix rp = r_ * qr.colsPermutation();
    const Matrix x = rt.transpose().triangularView<Eigen::Lower>().solve(rp.transpose());
    s.edf = x.squaredNorm();
    if (!s.coefficients.allFinite() || !std::isfinite(s.edf)) {
      throw DegenerateInputError("spline: penalized normal system is singular");
    }
    return s;
  }

  Vector fitted(const Vector& coefficients) const {
    Vector out(static_cast<Eigen::Index>(design_.rows()));
    for (std::size_t i = 0; i < design_.rows(); ++i) {
      double acc = 0.0;
      for (int k = 0; k < BSplineBasis::kOrder; ++k) {
        acc += design_.values[i][k] * coefficients[design_.first[i] + k];
      }
      out[static_cast<Eigen::Index>(i)] = acc;
    }
    return out;
  }

 private:
  // Givens update of (R, z) with one design row; the part of y the row
  // cannot explain accumulates in rss0.
  void absorb_row(Vector& row, double y, int first) {
    const Eigen::Index p = r_.cols();
    for (Eigen::Index k = first; k < p; ++k) {
      const double b = row[k];
      if (b == 0.0) continue;
      if (r_(k, k) == 0.0) {
        r_.row(k).tail(p - k) = row.tail(p - k).transpose();
        z_[k] = y;
        return;
      }
      const double rho = std::hypot(r_(k, k), b);
      const double c = r_(k, k) / rho;
      const double s = b / rho;
      for (Eigen::Index j = k; j < p; ++j) {
        const double t = r_(k, j);
        r_(k, j) = c * t + s * row[j];
        row[j] = -s * t + c * row[j];
      }
      const double t = z_[k];
      z_[k] = c * t + s * y;
      y = -s * t + c * y;
    }
    rss0_ += y * y;
  }

  BasisMatrix design_;
  Matrix penalty_;
  Matrix r_;
  Vector z_;
  double rss0_ = 0.0;
};

double gcv_score(double rss, double edf, std::size_t m) {
  const double dm = static_cast<double>(m);
  const double denom = dm - edf;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return dm * rss / (denom * denom);
}

SplineFitResult make_result(const PenalizedSystem& sys, double lambda,
                            const PenalizedSystem::Solution& s) {
  SplineFitResult r;
  r.knots = sys.design().basis.knots();
  r.coefficients = s.coefficients;
  r.lambda = lambda;
  r.edf = s.edf;
  r.rss = s.rss;
  r.gcv_score = gcv_score(s.rss, s.edf, sys.rows());
  r.fitted = sys.fitted(s.coefficients);
  return r;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
    throw DomainError("geometric_grid: need 0 < lo <= hi and points >= 1");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  }
  grid.back() = hi;
  return grid;
}

void SplineConfig::validate() const {
  if (n_interior_knots < 4) throw DomainError("spline.n_interior_knots must be >= 4");
  if (penalty_order < 1 || penalty_order > 3) {
    throw DomainError("spline.penalty_order must be 1, 2 or 3");
  }
  if (lambda_grid.empty()) throw DomainError("spline.lambda_grid must not be empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0) || !std::isfinite(lambda_grid[i])) {
      throw DomainError("spline.lambda_grid values must be positive");
    }
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
      throw DomainError("spline.lambda_grid must be strictly ascending");
    }
  }
}

// ---------------------------------------------------------------------------
// Basis
// ---------------------------------------------------------------------------

BSplineBasis::BSplineBasis(double lo, double hi, std::vector<double> interior) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DegenerateInputError("spline: boundary knots must satisfy lo < hi");
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (!(interior[i] > lo && interior[i] < hi) ||
        (i > 0 && !(interior[i] > interior[i - 1]))) {
      throw DomainError("spline: interior knots must be increasing and inside (lo, hi)");
    }
  }
  knots_.reserve(interior.size() + 2 * kOrder);
  knots_.insert(knots_.end(), kOrder, lo);
  knots_.insert(knots_.end(), interior.begin(), interior.end());
  knots_.insert(knots_.end(), kOrder, hi);
}

BSplineBasis BSplineBasis::from_data(std::span<const double> x, const SplineConfig& cfg) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DegenerateInputError("spline: non-finite predictor");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(lo < hi)) throw DegenerateInputError("spline: predictor is constant");

  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> interior;
  if (static_cast<int>(distinct.size()) < kFallbackDistinct) {
    interior.assign(distinct.begin() + 1, distinct.end() - 1);
  } else {
    const int k = cfg.n_interior_knots;
    for (int j = 1; j <= k; ++j) {
      const double q = quantile_sorted(sorted, static_cast<double>(j) / (k + 1));
      if (q > lo && q < hi && (interior.empty() || q > interior.back())) interior.push_back(q);
    }
  }
  return BSplineBasis(lo, hi, std::move(interior));
}

int BSplineBasis::evaluate(double x, std::array<double, kOrder>& values) const {
  if (!(x >= lower() && x <= upper())) {
    throw DomainError("spline: evaluation point outside the knot range");
  }
  const int last = dimension() - 1;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  int span = static_cast<int>(it - knots_.begin()) - 1;
  span = std::clamp(span, kDegree, last);

  // Triangular (de Boor) evaluation of the kOrder nonzero functions.
  std::array<double, kOrder> left{};
  std::array<double, kOrder> right{};
  values[0] = 1.0;
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = values[r] / (right[r + 1] + left[j - r]);
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return span - kDegree;
}

Vector BSplineBasis::evaluate_dense(double x) const {
  std::array<double, kOrder> v{};
  const int first = evaluate(x, v);
  Vector out = Vector::Zero(dimension());
  for (int k = 0; k < kOrder; ++k) out[first + k] = v[k];
  return out;
}

std::vector<double> BSplineBasis::greville() const {
  std::vector<double> g(static_cast<std::size_t>(dimension()));
  for (int j = 0; j < dimension(); ++j) {
    double acc = 0.0;
    for (int k = 1; k <= kDegree; ++k) acc += knots_[j + k];
    g[static_cast<std::size_t>(j)] = acc / kDegree;
  }
  return g;
}

Matrix BasisMatrix::dense() const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows()), cols());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (int k = 0; k < BSplineBasis::kOrder; ++k) {
      out(static_cast<Eigen::Index>(i), first[i] + k) = values[i][k];
    }
  }
  return out;
}

BasisMatrix build_basis(std::span<const double> x, const SplineConfig& cfg) {
  cfg.validate();
  if (x.size() < static_cast<std::size_t>(cfg.n_interior_knots + BSplineBasis::kOrder)) {
    throw DegenerateInputError("spline: need at least n_interior_knots + 4 points");
  }
  BasisMatrix b{BSplineBasis::from_data(x, cfg), {}, {}};
  b.first.resize(x.size());
  b.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) b.first[i] = b.basis.evaluate(x[i], b.values[i]);
  return b;
}

Matrix penalty_matrix(const BSplineBasis& basis, int order) {
  const int p = basis.dimension();
  if (order < 1 || order >= p) throw DomainError("spline: penalty order must be in [1, dim)");
  // Greville abscissae rescaled to unit mean spacing; the penalty is then
  // invariant to affine maps of x.
  std::vector<double> g = basis.greville();
  const double origin = g.front();
  const double spacing = (g.back() - origin) / (p - 1);
  for (double& v : g) v = (v - origin) / spacing;

  Matrix d = Matrix::Identity(p, p);
  for (int r = 1; r <= order; ++r) {
    Matrix next(d.rows() - 1, p);
    for (Eigen::Index j = 0; j < next.rows(); ++j) {
      const double width = (g[static_cast<std::size_t>(j + r)] - g[static_cast<std::size_t>(j)]) / r;
      next.row(j) = (d.row(j + 1) - d.row(j)) / width;
    }
    d = std::move(next);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

SplineFitResult fit_penalized(std::span<const double> x, std::span<const double> y,
                              double lambda, const SplineConfig& cfg) {
  const PenalizedSystem sys(x, y, cfg);
  return make_result(sys, lambda, sys.solve(lambda));
}

std::vector<GcvPoint> gcv_path(std::span<const double> x, std::span<const double> y,
                               const SplineConfig& cfg) {
  const PenalizedSystem sys(x, y, cfg);
  std::vector<GcvPoint> path;
  path.reserve(cfg.lambda_grid.size());
  for (double lambda : cfg.lambda_grid) {
    const auto s = sys.solve(lambda);
    path.push_back({lambda, s.rss, s.edf, gcv_score(s.rss, s.edf, sys.rows())});
  }
  return path;
}

std::pair<double, SplineFitResult> select_lambda_gcv(std::span<const double> x,
                                                     std::span<const double> y,
                                                     const SplineConfig& cfg) {
  const PenalizedSystem sys(x, y, cfg);
  double best_lambda = cfg.lambda_grid.front();
  double best_score = std::numeric_limits<double>::infinity();
  PenalizedSystem::Solution best;
  // Scores closer than the rounding error of the RSS count as ties.
  double sum_sq = 0.0;
  for (double v : y) sum_sq += v * v;
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * sum_sq /
                       static_cast<double>(sys.rows());
  for (double lambda : cfg.lambda_grid) {
    auto s = sys.solve(lambda);
    const double score = gcv_score(s.rss, s.edf, sys.rows());
    if (score <= best_score * (1.0 + kTieTolerance) + floor || !std::isfinite(best_score)) {
      best_score = score;
      best_lambda = lambda;
      best = std::move(s);
    }
  }
  return {best_lambda, make_result(sys, best_lambda, best)};
}

Vector predict(const SplineFitResult& fit, std::span<const double> x) {
  const auto& k = fit.knots;
  const auto order = static_cast<std::size_t>(BSplineBasis::kOrder);
  if (k.size() < 2 * order) throw DomainError("predict: malformed knot vector");
  const BSplineBasis basis(k.front(), k.back(),
                           std::vector<double>(k.begin() + order, k.end() - order));
  Vector out(static_cast<Eigen::Index>(x.size()));
  std::array<double, BSplineBasis::kOrder> v{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int first = basis.evaluate(x[i], v);
    double acc = 0.0;
    for (int j = 0; j < BSplineBasis::kOrder; ++j) acc += v[j] * fit.coefficients[first + j];
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

}  // namespace essk
