#include "essk/spline.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "essk/errors.hpp"
#include "essk/rng.hpp"
#include "essk/scenario.hpp"
#include "oracles.hpp"

namespace essk {
namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector uniform_x(int m, double lo, double hi, std::uint64_t seed) {
  auto s = substream(seed, 0, StreamPurpose::kTest);
  std::uniform_real_distribution<double> u(lo, hi);
  Vector x(m);
  for (auto& v : x) v = u(s);
  return x;
}

Vector noise(int m, double sd, std::uint64_t seed) {
  auto s = substream(seed, 1, StreamPurpose::kTest);
  std::normal_distribution<double> n(0.0, sd);
  Vector e(m);
  for (auto& v : e) v = n(s);
  return e;
}

double rmse(const Vector& a, const Vector& b) { return std::sqrt((a - b).squaredNorm() / a.size()); }

TEST(GeometricGridTest, EndpointsAndRatio) {
  const auto g = geometric_grid(1e-6, 1e6, 41);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-6);
  EXPECT_NEAR(g.back(), 1e6, 1e-3);
  EXPECT_NEAR(g[1] / g[0], std::pow(10.0, 0.3), 1e-12);
}

TEST(SplineConfigTest, Validation) {
  SplineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_interior_knots = 3;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.penalty_order = 4;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.lambda_grid = {1.0, 0.5};
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(BuildBasisTest, PartitionOfUnityAndDimension) {
  const Vector x = uniform_x(100, -3, 7, 1);
  const BasisMatrix b = build_basis(to_std(x), SplineConfig{});
  EXPECT_EQ(b.cols(), 34);
  const Matrix dense = b.dense();
  for (Eigen::Index i = 0; i < dense.rows(); ++i) EXPECT_NEAR(dense.row(i).sum(), 1.0, 1e-10);
}

TEST(BuildBasisTest, AgreesWithCoxDeBoorRecursion) {
  const Vector x = uniform_x(500, 0, 1, 2);
  const BSplineBasis basis = BSplineBasis::from_data(to_std(x), SplineConfig{});
  const auto& t = basis.knots();
  std::vector<double> points(t.begin(), t.end());
  for (int i = 0; i + 1 < static_cast<int>(t.size()); ++i) {
    if (t[i] < t[i + 1]) points.push_back(0.37 * t[i] + 0.63 * t[i + 1]);
  }
  for (double p : points) {
    const Vector v = basis.evaluate_dense(p);
    for (int i = 0; i < basis.dimension(); ++i) {
      EXPECT_NEAR(v[i], testing::cox_de_boor(t, i, BSplineBasis::kOrder, p), 1e-12)
          << "x=" << p << " i=" << i;
    }
  }
}

TEST(BuildBasisTest, RejectsDegenerateInput) {
  std::vector<double> constant(200, 1.5);
  EXPECT_THROW(build_basis(constant, SplineConfig{}), DegenerateInputError);
  std::vector<double> few(20, 0.0);
  for (std::size_t i = 0; i < few.size(); ++i) few[i] = static_cast<double>(i);
  EXPECT_THROW(build_basis(few, SplineConfig{}), DegenerateInputError);
  std::vector<double> bad(200, 0.0);
  for (std::size_t i = 0; i < bad.size(); ++i) bad[i] = static_cast<double>(i);
  bad[7] = std::nan("");
  EXPECT_THROW(build_basis(bad, SplineConfig{}), DegenerateInputError);
}

TEST(BuildBasisTest, FewDistinctValuesUseThemAsKnots) {
  std::vector<double> x;
  for (int rep = 0; rep < 40; ++rep) {
    for (double v : {0.0, 0.1, 0.2, 0.3, 0.5, 0.6, 0.9}) x.push_back(v);
  }
  const BSplineBasis b = BSplineBasis::from_data(x, SplineConfig{});
  // Interior knots at 0.1 .. 0.6, boundary knots at 0 and 0.9.
  EXPECT_EQ(b.dimension(), 5 + 4);
  EXPECT_DOUBLE_EQ(b.lower(), 0.0);
  EXPECT_DOUBLE_EQ(b.upper(), 0.9);
}

TEST(BuildBasisTest, TiedQuantilesAreDeduplicated) {
  // Binomial-like summaries: 21 distinct values, heavy ties.
  const DrawMatrix d = simulate_draws(*find_builtin("beta-binomial"), 5000, 1);
  const BSplineBasis b = BSplineBasis::from_data(to_std(d.summary.col(0)), SplineConfig{});
  const auto& t = b.knots();
  for (std::size_t i = 4; i + 4 < t.size(); ++i) EXPECT_LT(t[i - 1], t[i]);
}

TEST(FitPenalizedTest, ConstantResponseReproduced) {
  const Vector x = uniform_x(300, 0, 5, 3);
  const std::vector<double> y(300, 2.75);
  for (double lambda : {1e-6, 1.0, 1e6}) {
    const auto fit = fit_penalized(to_std(x), y, lambda, SplineConfig{});
    for (double f : fit.fitted) EXPECT_NEAR(f, 2.75, 1e-10);
  }
}

TEST(FitPenalizedTest, HugeLambdaGivesLeastSquaresLine) {
  const Vector x = uniform_x(1000, 0, 3, 4);
  const Vector y = (x.array().sin() + noise(1000, 0.3, 4).array()).matrix();
  const auto fit = fit_penalized(to_std(x), to_std(y), 1e12, SplineConfig{});
  const Vector ols = testing::ols_line(x, y);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(fit.fitted[i], ols[i], 1e-4 * std::abs(ols[i]) + 1e-12);
  }
  EXPECT_NEAR(fit.edf, 2.0, 1e-3);
}

TEST(FitPenalizedTest, InterpolatesWhenSquare) {
  SplineConfig cfg;
  const int m = cfg.n_interior_knots + 4;
  const Vector x = Vector::LinSpaced(m, 0.0, 1.0);
  const Vector y = noise(m, 1.0, 5);
  const auto fit = fit_penalized(to_std(x), to_std(y), 1e-10, cfg);
  for (Eigen::Index i = 0; i < m; ++i) EXPECT_NEAR(fit.fitted[i], y[i], 1e-6);
}

// With a square design the residual shrinks linearly in lambda.
TEST(FitPenalizedTest, SquareDesignResidualVanishesWithLambda) {
  SplineConfig cfg;
  const int m = cfg.n_interior_knots + 4;
  const Vector x = Vector::LinSpaced(m, 0.0, 1.0);
  const Vector y = noise(m, 1.0, 5);
  auto worst = [&](double lambda) {
    const auto fit = fit_penalized(to_std(x), to_std(y), lambda, cfg);
    return (fit.fitted - y).cwiseAbs().maxCoeff();
  };
  EXPECT_LT(worst(1e-14), 1e-6);
  EXPECT_NEAR(worst(1e-12) / worst(1e-14), 100.0, 1.0);
}

TEST(FitPenalizedTest, EdfIsTraceOfSmoother) {
  const Vector x = uniform_x(200, 0, 1, 6);
  SplineConfig cfg;
  const BasisMatrix b = build_basis(to_std(x), cfg);
  const Matrix B = b.dense();
  const Matrix D = penalty_matrix(b.basis, cfg.penalty_order);
  for (double lambda : {1e-3, 1.0, 1e3}) {
    const Matrix A = B.transpose() * B + lambda * D.transpose() * D;
    const Matrix S = B * A.ldlt().solve(B.transpose());
    const auto fit = fit_penalized(to_std(x), to_std(noise(200, 1.0, 6)), lambda, cfg);
    EXPECT_NEAR(fit.edf, S.trace(), 1e-7 * S.trace());
    EXPECT_GE(fit.edf, 2.0 - 1e-9);
    EXPECT_LE(fit.edf, b.cols() + 1e-9);
  }
}

TEST(FitPenalizedTest, AddingConstantShiftsFit) {
  const Vector x = uniform_x(500, -2, 2, 7);
  const Vector y = (x.array().cube() + noise(500, 0.5, 7).array()).matrix();
  const Vector y2 = (y.array() + 12.5).matrix();
  const auto a = fit_penalized(to_std(x), to_std(y), 0.3, SplineConfig{});
  const auto b = fit_penalized(to_std(x), to_std(y2), 0.3, SplineConfig{});
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(b.fitted[i], a.fitted[i] + 12.5, 1e-10);
  const auto [la, fa] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  const auto [lb, fb] = select_lambda_gcv(to_std(x), to_std(y2), SplineConfig{});
  EXPECT_EQ(la, lb);
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(fb.fitted[i], fa.fitted[i] + 12.5, 1e-10);
}

TEST(FitPenalizedTest, AffineInvariantInX) {
  const Vector x = uniform_x(800, 0, 1, 8);
  const Vector y = ((6 * x.array()).sin() + noise(800, 0.2, 8).array()).matrix();
  const Vector x2 = (-3.0 * x.array() + 40.0).matrix();
  const auto [la, a] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  const auto [lb, b] = select_lambda_gcv(to_std(x2), to_std(y), SplineConfig{});
  EXPECT_EQ(la, lb);
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(a.fitted[i], b.fitted[i], 1e-8);
}

TEST(SelectLambdaTest, LinearTruth) {
  const Vector x = uniform_x(2000, 0, 1, 9);
  const Vector truth = 2.0 * x;
  const Vector y = truth + noise(2000, 0.1, 9);
  const auto [lambda, fit] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  EXPECT_LT(fit.edf, 6.0);
  EXPECT_LT(rmse(fit.fitted, truth), 0.02);
  EXPECT_EQ(lambda, fit.lambda);
}

TEST(SelectLambdaTest, SineTruth) {
  const Vector x = uniform_x(2000, 0, std::numbers::pi, 10);
  const Vector truth = (4.0 * x.array()).sin().matrix();
  const Vector y = truth + noise(2000, 0.2, 10);
  const auto [lambda, fit] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  EXPECT_LT(rmse(fit.fitted, truth), 0.06);
}

TEST(SelectLambdaTest, PureNoiseIsSmoothedAway) {
  const Vector x = uniform_x(2000, 0, 1, 11);
  const Vector y = noise(2000, 1.0, 11);
  const auto [lambda, fit] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  EXPECT_LT(testing::variance(fit.fitted), 0.05 * testing::variance(y));
}

TEST(SelectLambdaTest, PicksGridMinimumWithTiesToLargerLambda) {
  const Vector x = uniform_x(1000, 0, 1, 12);
  const Vector y = (x.array().exp() + noise(1000, 0.3, 12).array()).matrix();
  const auto path = gcv_path(to_std(x), to_std(y), SplineConfig{});
  const auto [lambda, fit] = select_lambda_gcv(to_std(x), to_std(y), SplineConfig{});
  double best = INFINITY;
  for (const auto& p : path) best = std::min(best, p.gcv);
  for (const auto& p : path) {
    if (p.lambda > lambda) EXPECT_GT(p.gcv, best * (1 + 1e-12));
  }
  EXPECT_NEAR(fit.gcv_score, best, 1e-12 * best);

  // A constant response has identical (zero) GCV everywhere.
  const std::vector<double> flat(1000, 1.0);
  const auto [flat_lambda, flat_fit] = select_lambda_gcv(to_std(x), flat, SplineConfig{});
  EXPECT_EQ(flat_lambda, SplineConfig{}.lambda_grid.back());
}

TEST(GcvPathTest, MonotoneRssAndEdf) {
  const Vector x = uniform_x(1500, 0, 2, 13);
  const Vector y = ((3 * x.array()).cos() + noise(1500, 0.4, 13).array()).matrix();
  const auto path = gcv_path(to_std(x), to_std(y), SplineConfig{});
  ASSERT_EQ(path.size(), 41u);
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_GT(path[i].lambda, path[i - 1].lambda);
    EXPECT_GE(path[i].rss, path[i - 1].rss * (1 - 1e-10));
    EXPECT_LE(path[i].edf, path[i - 1].edf * (1 + 1e-10));
    const double m = 1500.0;
    EXPECT_NEAR(path[i].gcv, m * path[i].rss / ((m - path[i].edf) * (m - path[i].edf)),
                1e-12 * path[i].gcv);
  }
}

// The smoother never inflates variance; checked on every benchmark scenario
// and every grid value.
TEST(GcvPathTest, FittedVarianceBelowResponseVariance) {
  for (const auto& s : builtin_scenarios()) {
    const DrawMatrix d = simulate_draws(s, 2000, 21);
    for (Eigen::Index j = 0; j < d.dimension(); ++j) {
      const auto x = to_std(d.summary.col(j));
      const auto y = to_std(d.phi.col(j));
      const double var_y = testing::variance(d.phi.col(j));
      for (double lambda : SplineConfig{}.lambda_grid) {
        const auto fit = fit_penalized(x, y, lambda, SplineConfig{});
        EXPECT_LE(testing::variance(fit.fitted), var_y * (1 + 1e-12)) << s.name << " " << lambda;
      }
    }
  }
}

TEST(PredictTest, ReproducesFittedValues) {
  const Vector x = uniform_x(400, 1, 4, 14);
  const Vector y = (x.array().log() + noise(400, 0.1, 14).array()).matrix();
  const auto fit = fit_penalized(to_std(x), to_std(y), 0.5, SplineConfig{});
  const Vector p = predict(fit, to_std(x));
  for (Eigen::Index i = 0; i < x.size(); ++i) EXPECT_NEAR(p[i], fit.fitted[i], 1e-12);
  const std::vector<double> outside = {100.0};
  EXPECT_THROW(predict(fit, outside), DomainError);
}

}  // namespace
}  // namespace essk
