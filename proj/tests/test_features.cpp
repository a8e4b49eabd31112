#include <doctest.h>

#include <Eigen/Dense>

#include "eatune/features.hpp"
#include "eatune/rng.hpp"
#include "oracles.hpp"

using namespace eatune;

namespace {
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  CounterRng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}
}  // namespace

TEST_CASE("normalize_energy") {
  CalibrationPoint cal;
  cal.reference_energy = 1000.0;
  CHECK(normalize_energy(1000.0, cal) == 1.0);
  CHECK(normalize_energy(950.0, cal) == doctest::Approx(0.95).epsilon(1e-15));
  cal.reference_energy = 0.0;
  CHECK_THROWS_AS(normalize_energy(10.0, cal), Error);
  cal.reference_energy = -3.0;
  try {
    normalize_energy(10.0, cal);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidCalibration);
  }
  CHECK(cal.core == Frequency::from_ghz(2.0));
  CHECK(cal.uncore == Frequency::from_ghz(1.5));
}

TEST_CASE("normalize_counters") {
  const PmcVector zero;
  const PmcVector rz = normalize_counters(zero, 3.0);
  CHECK(rz.normalized);
  CHECK(rz.values.isZero());

  CounterValues v = CounterValues::Zero();
  v(static_cast<int>(Counter::LdIns)) = 2e9;
  const PmcVector rates = normalize_counters(PmcVector(v), 2.0);
  CHECK(rates[Counter::LdIns] == 1e9);

  CHECK_THROWS_AS(normalize_counters(rates, 2.0), Error);
  CHECK_THROWS_AS(normalize_counters(PmcVector(v), 0.0), Error);
}

TEST_CASE("fit_standardizer on two rows uses the population deviation") {
  Eigen::MatrixXd m(2, 9);
  m.row(0).setZero();
  m.row(1).setConstant(2.0);
  const Standardizer s = Standardizer::fit(m);
  CHECK(s.means().isApproxToConstant(1.0));
  CHECK(s.scales().isApproxToConstant(1.0));
  const Eigen::MatrixXd z = s.apply_rows(m);
  CHECK(z.colwise().mean().norm() < 1e-15);
}

TEST_CASE("fit_standardizer agrees with a two-pass statistics oracle") {
  const Eigen::MatrixXd m = (random_matrix(100, 9, 3).array() * 5.0 + 2.0).matrix();
  const Standardizer s = Standardizer::fit(m);
  const auto raw = oracle::two_pass_stats(m);
  for (int j = 0; j < 9; ++j) {
    CHECK(std::abs(s.means()(j) - raw.mean[static_cast<std::size_t>(j)]) < 1e-10);
    CHECK(std::abs(s.scales()(j) - std::sqrt(raw.variance[static_cast<std::size_t>(j)])) < 1e-10);
  }
  const auto st = oracle::two_pass_stats(s.apply_rows(m));
  for (int j = 0; j < 9; ++j) {
    CHECK(std::abs(st.mean[static_cast<std::size_t>(j)]) < 1e-10);
    CHECK(std::abs(st.variance[static_cast<std::size_t>(j)] - 1.0) < 1e-8);
  }
}

TEST_CASE("standardizer preserves affine relations between rows") {
  const Eigen::MatrixXd m = random_matrix(20, 9, 11);
  const Standardizer s = Standardizer::fit(m);
  const Eigen::VectorXd a = m.row(0).transpose();
  const Eigen::VectorXd b = m.row(1).transpose();
  const double t = 0.3;
  const Eigen::VectorXd lhs = s.apply(t * a + (1 - t) * b);
  const Eigen::VectorXd rhs = t * s.apply(a) + (1 - t) * s.apply(b);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("fit_standardizer names a constant column") {
  Eigen::MatrixXd m = random_matrix(10, 9, 5);
  m.col(4).setConstant(3.5);
  try {
    Standardizer::fit(m);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFeature);
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
  CHECK_THROWS_AS(Standardizer::fit(m.topRows(1)), Error);
}

TEST_CASE("compute_vif on orthogonal columns is one") {
  Eigen::MatrixXd m(4, 2);
  m << 1, 1, -1, 1, 1, -1, -1, -1;
  CHECK(compute_vif(m, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(compute_vif(m, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("compute_vif rejects a duplicated column") {
  Eigen::MatrixXd m = random_matrix(30, 4, 8);
  m.col(3) = m.col(1);
  try {
    compute_vif(m, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CollinearFeature);
  }
}

TEST_CASE("compute_vif matches the inverse correlation diagonal and is at least one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd m = random_matrix(40, 5, 100 + seed);
    m.col(2) += 0.8 * m.col(0);  // some correlation
    const Eigen::VectorXd expected = oracle::vif_from_inverse_correlation(m);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = compute_vif(m, j);
      CHECK(v >= 1.0);
      CHECK(std::abs(v - expected(j)) < 1e-8);
    }
  }
}

TEST_CASE("compute_vif preconditions") {
  const Eigen::MatrixXd m = random_matrix(3, 3, 1);
  CHECK_THROWS_AS(compute_vif(m, 0), Error);
  CHECK_THROWS_AS(compute_vif(random_matrix(10, 3, 1), 3), Error);
}

TEST_CASE("select_counters keeps a perfect predictor only") {
  const Eigen::MatrixXd base = random_matrix(50, 2, 21);
  const Eigen::VectorXd target = 3.0 * base.col(0);
  const auto chosen = select_counters(base, target);
  REQUIRE(chosen.size() == 1);
  CHECK(chosen[0] == 0);
}

TEST_CASE("select_counters never admits both copies of a column") {
  Eigen::MatrixXd c = random_matrix(60, 3, 22);
  c.col(1) = c.col(0);
  const Eigen::VectorXd target = c.col(0) + c.col(2);
  const auto chosen = select_counters(c, target);
  REQUIRE(chosen.size() == 2);
  const bool has0 = std::find(chosen.begin(), chosen.end(), 0) != chosen.end();
  const bool has1 = std::find(chosen.begin(), chosen.end(), 1) != chosen.end();
  CHECK(has0 != has1);
  CHECK(std::find(chosen.begin(), chosen.end(), 2) != chosen.end());
}

TEST_CASE("select_counters recovers the true columns found by best-subset search") {
  const Eigen::MatrixXd c = random_matrix(200, 10, 23);
  const Eigen::VectorXd noise = random_matrix(200, 1, 24).col(0);
  const Eigen::VectorXd target = 2.0 * c.col(1) - 1.5 * c.col(4) + 0.7 * c.col(8) + 0.01 * noise;
  auto chosen = select_counters(c, target);
  std::sort(chosen.begin(), chosen.end());
  const auto brute = oracle::best_subset(c, target, 3);
  CHECK(chosen == brute);
  CHECK(chosen == std::vector<Eigen::Index>{1, 4, 8});
  CHECK(mean_vif(c(Eigen::all, chosen)) <= 10.0);
}

TEST_CASE("select_counters respects the mean-VIF guard") {
  Eigen::MatrixXd c = random_matrix(80, 3, 31);
  const Eigen::VectorXd jitter = random_matrix(80, 1, 32).col(0);
  c.col(1) = c.col(0) + 0.05 * jitter;  // VIF around 400 against column 0
  const Eigen::VectorXd target = c.col(0) + c.col(1) + c.col(2);
  const auto chosen = select_counters(c, target);
  CHECK(mean_vif(c(Eigen::all, chosen)) <= 10.0);
  CHECK_THROWS_AS(select_counters(Eigen::MatrixXd(10, 0), Eigen::VectorXd::Zero(10)), Error);
}

TEST_CASE("rows_from_sweep normalizes against the calibration sample") {
  std::vector<PhaseSample> sweep;
  for (double cf : {1.5, 2.0, 2.5}) {
    PhaseSample s;
    s.config = SystemConfig{24, Frequency::from_ghz(cf), Frequency::from_ghz(1.5)};
    s.duration = 2.0;
    s.node_energy = 400.0 * cf;
    s.counters = PmcVector(CounterValues::Constant(4.0));
    sweep.push_back(s);
  }
  const BenchmarkRows rows = rows_from_sweep(sweep);
  REQUIRE(rows.rows.size() == 3);
  CHECK(rows.rows[1].target == 1.0);
  CHECK(rows.rows[0].target == doctest::Approx(0.75));
  CHECK(rows.calibration_rates.values.isApproxToConstant(2.0));
  CHECK(rows.rows[2].features(7) == doctest::Approx(2.5));
  CHECK(rows.rows[2].features(8) == doctest::Approx(1.5));

  sweep.erase(sweep.begin() + 1);
  CHECK_THROWS_AS(rows_from_sweep(sweep), Error);
}
