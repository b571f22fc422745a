#pragma once
// Closed-form spectra and an SVD-free resolvent norm.

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace oracle {

// -u'' on [0, 1], u(0) = 0, u'(1) = 0.
inline double mixed_eigenvalue(int m) {
  const double w = (m + 0.5) * M_PI;
  return w * w;
}

// Same operator, 3-point stencil on n + 1 nodes with a mirrored ghost at x = 1.
// sin((m + 1/2) pi x) is an exact grid eigenvector of that scheme.
inline double mixed_grid_eigenvalue(int m, double h) {
  const double s = std::sin((m + 0.5) * M_PI * h / 2.0);
  return 4.0 / (h * h) * s * s;
}

// Dirichlet at both ends of [0, 1].
inline double dirichlet_grid_eigenvalue(int m, double h) {
  const double s = std::sin(m * M_PI * h / 2.0);
  return 4.0 / (h * h) * s * s;
}

// ||(A - i mu)^{-1}||_2 from an LU inverse and the top eigenvalue of G^H G.
inline double resolvent_norm_lu(const Eigen::MatrixXd& a, double mu) {
  using C = std::complex<double>;
  Eigen::MatrixXcd shifted = a.cast<C>();
  shifted.diagonal().array() -= C(0.0, mu);
  const Eigen::MatrixXcd g = shifted.partialPivLu().inverse();
  const Eigen::MatrixXcd gram = g.adjoint() * g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

}  // namespace oracle
