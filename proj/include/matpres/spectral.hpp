#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "matpres/hermitian.hpp"

namespace matpres {

template <class R>
HermMatrix<double> herm_to_double(const HermMatrix<R>& m) {
  HermMatrix<double> r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    r.set_diag(i, scalar_traits<R>::to_double(m.diag(i)));
  for (int i = 1; i < m.dim(); ++i)
    for (int j = 0; j < i; ++j) {
      Cplx<R> z = m.at(i, j);
      r.set_lower(i, j, Cplx<double>(scalar_traits<R>::to_double(z.re),
                                     scalar_traits<R>::to_double(z.im)));
    }
  return r;
}

inline Eigen::MatrixXcd to_eigen(const HermMatrix<double>& m) {
  Eigen::MatrixXcd e(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      Cplx<double> z = m.at(i, j);
      e(i, j) = std::complex<double>(z.re, z.im);
    }
  return e;
}

inline HermMatrix<double> from_eigen_selfadjoint(const Eigen::MatrixXcd& e) {
  HermMatrix<double> r(static_cast<int>(e.rows()));
  for (int i = 0; i < r.dim(); ++i) r.set_diag(i, e(i, i).real());
  for (int i = 1; i < r.dim(); ++i)
    for (int j = 0; j < i; ++j)
      r.set_lower(i, j, Cplx<double>(e(i, j).real(), e(i, j).imag()));
  return r;
}

struct EigenSystem {
  std::vector<double> values;          // ascending
  std::vector<CVec<double>> vectors;   // unit eigenvectors, values[k] <-> vectors[k]
};

inline EigenSystem eigensystem(const HermMatrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
  if (es.info() != Eigen::Success)
    throw NumericError("Hermitian eigenvalue iteration failed to converge");
  EigenSystem out;
  out.values.resize(m.dim());
  out.vectors.resize(m.dim());
  for (int k = 0; k < m.dim(); ++k) {
    out.values[k] = es.eigenvalues()(k);
    CVec<double> v(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
      std::complex<double> z = es.eigenvectors()(i, k);
      v[i] = Cplx<double>(z.real(), z.imag());
    }
    out.vectors[k] = std::move(v);
  }
  return out;
}

inline double min_eigenvalue(const HermMatrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("Hermitian eigenvalue iteration failed to converge");
  return es.eigenvalues()(0);
}

/// (lambda_min, unit eigenvector) — the refutation direction used by samplers.
inline std::pair<double, CVec<double>> min_eig_pair(const HermMatrix<double>& m) {
  EigenSystem es = eigensystem(m);
  return {es.values.front(), es.vectors.front()};
}

inline double spectral_norm(const HermMatrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("Hermitian eigenvalue iteration failed to converge");
  return std::max(std::abs(es.eigenvalues()(0)),
                  std::abs(es.eigenvalues()(m.dim() - 1)));
}

/// PSD test with a relative floor: min eig >= -tol * max(1, ||M||_2).
inline bool is_psd(const HermMatrix<double>& m, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("Hermitian eigenvalue iteration failed to converge");
  double lo = es.eigenvalues()(0);
  double norm = std::max(std::abs(lo), std::abs(es.eigenvalues()(m.dim() - 1)));
  return lo >= -tol * std::max(1.0, norm);
}

template <class R>
bool is_psd(const HermMatrix<R>& m, double tol = 1e-9) {
  return is_psd(herm_to_double(m), tol);
}

/// Spectral split M = P - N with P, N PSD supported on complementary
/// eigenspaces (so <P, N> = 0 up to roundoff).
inline std::pair<HermMatrix<double>, HermMatrix<double>> decompose_pm(
    const HermMatrix<double>& m) {
  EigenSystem es = eigensystem(m);
  HermMatrix<double> p(m.dim()), n(m.dim());
  for (int k = 0; k < m.dim(); ++k) {
    double lam = es.values[k];
    if (lam == 0.0) continue;
    HermMatrix<double> proj = outer(es.vectors[k]);
    if (lam > 0)
      p += proj * lam;
    else
      n += proj * (-lam);
  }
  return {std::move(p), std::move(n)};
}

}  // namespace matpres
