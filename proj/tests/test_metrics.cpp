#include <cmath>
#include <sstream>

#include "doctest.h"

#include "crude/baselines.hpp"
#include "crude/data.hpp"
#include "crude/metrics.hpp"
#include "crude/recalibrator.hpp"
#include "helpers.hpp"

using namespace crude;
using testutil::make_set;

namespace {

const PredictionSet kTest = make_set({{0.0, 1.0, 0.1},
                                      {1.0, 2.0, 3.2},
                                      {-1.0, 0.5, -0.9},
                                      {2.0, 1.5, 0.4},
                                      {0.5, 2.0, 0.5}});

QuantileFn identity_fn() {
  return [](const PredictionRecord& r, double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return identity_quantile(r.prediction(), p);
  };
}

}  // namespace

TEST_CASE("calibration_curve counts strict exceedances at j / S") {
  const auto curve = calibration_curve(kTest, identity_fn(), 4);
  REQUIRE(curve.expected.size() == 5);
  REQUIRE(curve.observed.size() == 5);
  CHECK(curve.step_count == 4);
  CHECK(curve.expected == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(curve.observed == std::vector<double>{0.0, 0.2, 0.2, 0.8, 1.0});
}

TEST_CASE("calibration_curve endpoints are forced by the strict inequality") {
  // At p = 0 nothing lies below the essential infimum; at p = 1 a +inf
  // quantile strictly exceeds every finite y.
  const auto curve = calibration_curve(kTest, identity_fn(), 1);
  CHECK(curve.observed.front() == 0.0);
  CHECK(curve.observed.back() == 1.0);
}

TEST_CASE("a y exactly on the quantile counts as not covered") {
  const PredictionSet one = make_set({{0.0, 1.0, 0.0}});
  const auto curve = calibration_curve(one, identity_fn(), 2);
  // The median of N(0, 1) is exactly 0.0 and y == 0.0, so p_hat(0.5) = 0.
  CHECK(curve.observed[1] == 0.0);
}

TEST_CASE("calibration_curve argument validation") {
  CHECK_THROWS_AS(calibration_curve(PredictionSet{}, identity_fn(), 4), EmptySet);
  CHECK_THROWS_AS(calibration_curve(make_set({{0.0, 1.0, std::nullopt}}), identity_fn(), 4),
                  UnlabeledSet);
  CHECK_THROWS_AS(calibration_curve(kTest, identity_fn(), 0), ValidationError);
  CHECK_THROWS_AS(calibration_curve(kTest, identity_fn(), -3), ValidationError);
}

TEST_CASE("calibration_score on frozen curves") {
  const auto curve = calibration_curve(kTest, identity_fn(), 4);
  CHECK(calibration_score(curve) == doctest::Approx(0.1541103500742244).epsilon(1e-14));

  CalibrationCurve perfect;
  perfect.step_count = 10;
  for (int j = 0; j <= 10; ++j) {
    perfect.expected.push_back(j / 10.0);
    perfect.observed.push_back(j / 10.0);
  }
  CHECK(calibration_score(perfect) == 0.0);

  CalibrationCurve zeros;
  zeros.step_count = 100;
  for (int j = 0; j <= 100; ++j) {
    zeros.expected.push_back(j / 100.0);
    zeros.observed.push_back(0.0);
  }
  CHECK(calibration_score(zeros) == doctest::Approx(0.5816786054171151).epsilon(1e-14));
}

TEST_CASE("calibration_score validates curve shape") {
  CalibrationCurve bad;
  bad.step_count = 4;
  bad.expected = {0.0, 0.5, 1.0};
  bad.observed = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(calibration_score(bad), ValidationError);
  bad.observed = {0.0, 0.5};
  CHECK_THROWS_AS(calibration_score(bad), LengthMismatch);
}

TEST_CASE("sharpness is the root mean predicted variance") {
  const double var_z = 0.8286999999999998;
  const auto sharp = sharpness(kTest, [&](const PredictionRecord& r) {
    return r.sigma * r.sigma * var_z;
  });
  CHECK(sharp == doctest::Approx(1.3805832100963706).epsilon(1e-14));

  const auto unit = sharpness(kTest, [](const PredictionRecord& r) {
    return r.sigma * r.sigma;
  });
  // sigmas 1, 2, 0.5, 1.5, 2 -> mean variance 11.5 / 5.
  CHECK(unit == doctest::Approx(std::sqrt(11.5 / 5.0)).epsilon(1e-15));
  CHECK_THROWS_AS(sharpness(PredictionSet{}, [](const PredictionRecord&) { return 1.0; }),
                  EmptySet);
}

TEST_CASE("pit_values applies the cdf per record") {
  const auto pit = pit_values(kTest, [](const PredictionRecord& r, double y) {
    return normal_cdf((y - r.mu) / r.sigma);
  });
  REQUIRE(pit.values.size() == kTest.size());
  for (std::size_t i = 0; i < kTest.size(); ++i) {
    const auto& r = kTest.records[i];
    CHECK(pit.values[i] ==
          doctest::Approx(normal_cdf((*r.y - r.mu) / r.sigma)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(pit_values(make_set({{0.0, 1.0, std::nullopt}}),
                             [](const PredictionRecord&, double) { return 0.5; }),
                  UnlabeledSet);
}

TEST_CASE("PIT of a well-specified model is uniform") {
  SyntheticConfig config;
  config.n = 5000;
  config.family = ErrorFamily::kGaussian;
  config.hetero = true;
  config.seed = 3;
  const auto data = synth_generate(config);
  const auto pit = pit_values(data.predictions, [](const PredictionRecord& r, double y) {
    return normal_cdf((y - r.mu) / r.sigma);
  });
  CHECK(testutil::ks_uniform(pit.values) < 1.6276236307187293 / std::sqrt(5000.0));
}

TEST_CASE("write_curve_csv round-trips every double") {
  CalibrationCurve curve;
  curve.step_count = 2;
  curve.expected = {0.0, 0.5, 1.0};
  curve.observed = {0.0, 0.3333333333333333, 1.0};
  std::ostringstream out;
  write_curve_csv(curve, out);
  CHECK(out.str() == "p,p_hat\n0,0\n0.5,0.3333333333333333\n1,1\n");
}

TEST_CASE("recalibrator facade dispatches all four methods") {
  const auto cal = make_set({{0.0, 1.0, 0.62},
                             {1.0, 2.0, -0.4},
                             {-1.0, 0.5, -1.3},
                             {2.0, 1.5, 4.1},
                             {0.5, 1.0, 0.5},
                             {3.0, 2.5, -0.75},
                             {-2.0, 0.8, -1.6},
                             {1.2, 1.1, 2.3}});
  const Prediction pred{10.0, 2.0};

  const auto crude_r = Recalibrator::from_crude(fit_crude(cal));
  CHECK(crude_r.method() == "crude");
  CHECK(crude_r.quantile(pred, 0.5) == 11.0);
  CHECK(crude_r.cdf(pred, 12.0) == 0.875);
  CHECK(crude_r.variance(pred) == doctest::Approx(3.314799999999999).epsilon(1e-14));

  const auto conf_r = Recalibrator::from_conformal(fit_conformal(cal));
  CHECK(conf_r.method() == "conformal");
  CHECK(conf_r.quantile(pred, 0.5) == crude_r.quantile(pred, 0.5));
  CHECK(conf_r.quantile(pred, 0.9) == crude_r.quantile(pred, 0.9));

  const auto mle_r = Recalibrator::from_gaussian_mle(fit_gaussian_mle(cal));
  CHECK(mle_r.method() == "gaussian_mle");
  CHECK(mle_r.quantile(pred, 0.8) == doctest::Approx(11.712305459722202).epsilon(1e-12));
  const auto* mle = mle_r.gaussian_mle_model();
  REQUIRE(mle != nullptr);
  CHECK(mle_r.variance(pred) ==
        doctest::Approx(pred.sigma * mle->s * pred.sigma * mle->s).epsilon(1e-15));
  CHECK(mle_r.cdf(pred, 11.0) ==
        doctest::Approx(normal_cdf((0.5 - mle->m) / mle->s)).epsilon(1e-12));

  const auto kul_r = Recalibrator::from_kuleshov(fit_kuleshov(cal));
  CHECK(kul_r.method() == "kuleshov");
  CHECK(kul_r.quantile(pred, 0.4) == doctest::Approx(9.061259441163942).epsilon(1e-9));
  CHECK(kul_r.cdf(pred, 9.0) == doctest::Approx(0.3939838839822585).epsilon(1e-12));
  CHECK(kul_r.cdf(pred, 11.0) == doctest::Approx(0.6250000000000003).epsilon(1e-12));
  CHECK(kul_r.variance(pred) == doctest::Approx(3.9401693897135406).epsilon(1e-9));

  const auto id_r = Recalibrator::identity();
  CHECK(id_r.method() == "none");
  CHECK(id_r.quantile(pred, 0.5) == 10.0);
  CHECK(id_r.variance(pred) == 4.0);
  CHECK(id_r.cdf(pred, 11.0) == doctest::Approx(normal_cdf(0.5)).epsilon(1e-15));
}

TEST_CASE("recalibrator quantile endpoints") {
  const auto id_r = Recalibrator::identity();
  CHECK(id_r.quantile({0.0, 1.0}, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(id_r.quantile({0.0, 1.0}, 1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(id_r.quantile({0.0, 1.0}, -0.1), ProbabilityOutOfRange);
  CHECK_THROWS_AS(id_r.quantile({0.0, 1.0}, 1.5), ProbabilityOutOfRange);

  const auto crude_r = Recalibrator::from_crude(
      CrudeModel(EmpiricalErrorDistribution::from_samples({-1.0, 0.0, 1.0})));
  CHECK(crude_r.quantile({5.0, 2.0}, 0.0) == 3.0);
  CHECK(crude_r.quantile({5.0, 2.0}, 1.0) == 7.0);
}

TEST_CASE("evaluate_recalibrator fills the report") {
  const auto report = evaluate_recalibrator(Recalibrator::identity(), kTest, 4, 77);
  CHECK(report.method == "none");
  CHECK(report.calibration_rmse == doctest::Approx(0.1541103500742244).epsilon(1e-14));
  CHECK(report.sharpness == doctest::Approx(std::sqrt(11.5 / 5.0)).epsilon(1e-15));
  CHECK(report.trial_seed == 77);
}

TEST_CASE("recalibrator_curve and recalibrator_pit mirror the free metrics") {
  const auto cal = make_set({{0.0, 1.0, 0.62},
                             {1.0, 2.0, -0.4},
                             {-1.0, 0.5, -1.3},
                             {2.0, 1.5, 4.1},
                             {0.5, 1.0, 0.5},
                             {3.0, 2.5, -0.75},
                             {-2.0, 0.8, -1.6},
                             {1.2, 1.1, 2.3}});
  const auto recal = Recalibrator::from_crude(fit_crude(cal));
  const auto curve = recalibrator_curve(recal, kTest, 10);
  const auto manual = calibration_curve(
      kTest,
      [&](const PredictionRecord& r, double p) { return recal.quantile(r.prediction(), p); },
      10);
  CHECK(curve.observed == manual.observed);
  CHECK(curve.expected == manual.expected);

  const auto pit = recalibrator_pit(recal, kTest);
  for (std::size_t i = 0; i < kTest.size(); ++i) {
    const auto& r = kTest.records[i];
    CHECK(pit.values[i] == recal.cdf(r.prediction(), *r.y));
  }
}
