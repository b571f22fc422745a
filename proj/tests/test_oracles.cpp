// The oracles are independent of the library; these checks pin them to hand values.
#include "doctest.h"
#include "oracles/frozen.hpp"
#include "oracles/spectra.hpp"
#include "oracles/unfolding.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

TEST_CASE("unfolding oracle on hand examples") {
  CHECK(*oracle::first_entry({0.6}, {1.0}, {{0, 1}}, {{0.4, 0.6}}, 5.0) == doctest::Approx(frozen::kWorstEntry1D));
  CHECK(*oracle::first_entry({0.4}, {-1.0}, {{0, 1}}, {{0.4, 0.6}}, 5.0) == doctest::Approx(0.8));
  CHECK(*oracle::first_entry({0.1}, {1.0}, {{0, 1}}, {{0.4, 0.6}}, 5.0) == doctest::Approx(0.3));
  CHECK(*oracle::first_entry({0.1}, {-1.0}, {{0, 1}}, {{0.4, 0.6}}, 5.0) == doctest::Approx(0.5));
  CHECK(*oracle::first_entry({0.5}, {1.0}, {{0, 1}}, {{0.4, 0.6}}, 5.0) == 0.0);
  CHECK_FALSE(oracle::first_entry({0.2, 0.3}, {0.0, 1.0}, {{0, 1}, {0, 1}}, {{0.4, 0.6}, {0, 1}}, 20.0).has_value());
  // 2D diagonal from the corner hits the centre box at t = sqrt(2) * 0.4
  const double c = 1.0 / std::sqrt(2.0);
  CHECK(*oracle::first_entry({0.0, 0.0}, {c, c}, {{0, 1}, {0, 1}}, {{0.4, 0.6}, {0.4, 0.6}}, 5.0) ==
        doctest::Approx(0.4 * std::sqrt(2.0)));
}

TEST_CASE("grid eigenvalue formulas") {
  // small h limit reproduces the continuum values
  CHECK(oracle::mixed_grid_eigenvalue(0, 1e-4) == doctest::Approx(oracle::mixed_eigenvalue(0)).epsilon(1e-8));
  CHECK(oracle::mixed_eigenvalue(1) == doctest::Approx(2.25 * M_PI * M_PI));
  CHECK(oracle::dirichlet_grid_eigenvalue(1, 0.5) == doctest::Approx(8.0));  // one interior node: 2 / h^2
}

TEST_CASE("LU resolvent oracle agrees with SVD on random matrices") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd a(12, 12);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    const double mu = 0.7 * trial;
    Eigen::MatrixXcd shifted = a.cast<std::complex<double>>();
    shifted.diagonal().array() -= std::complex<double>(0.0, mu);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    CHECK(oracle::resolvent_norm_lu(a, mu) == doctest::Approx(1.0 / svd.singularValues().minCoeff()).epsilon(1e-10));
  }
}
