/*
 * Copyright 2026 The qsep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qsep/statekit.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace qsep::state {

namespace {

using cd = std::complex<double>;

double hermitian_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

BipartiteDims::BipartiteDims(int d_a, int d_b) : d_a_(d_a), d_b_(d_b) {
  if (d_a < 2 || d_b < 2) {
    throw InvalidDimension("subsystem dimensions must be >= 2, got " + std::to_string(d_a) +
                           "x" + std::to_string(d_b));
  }
}

BipartiteDims BipartiteDims::parse(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw InvalidDimension("expected dims like 2x2, got '" + text + "'");
  try {
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, x), &used_a);
    const int b = std::stoi(text.substr(x + 1), &used_b);
    if (used_a != x || used_b != text.size() - x - 1) throw std::invalid_argument(text);
    return BipartiteDims(a, b);
  } catch (const std::logic_error&) {
    throw InvalidDimension("expected dims like 2x2, got '" + text + "'");
  }
}

std::string BipartiteDims::str() const {
  return std::to_string(d_a_) + "x" + std::to_string(d_b_);
}

DensityMatrix::DensityMatrix(BipartiteDims dims, const ComplexMatrix& m) : dims_(dims) {
  const int d = dims.total();
  if (m.rows() != d || m.cols() != d) {
    throw InvalidDimension("density matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (hermitian_defect(m) > kHermitianTol) throw InvalidInput("matrix is not Hermitian");
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    throw InvalidInput("matrix trace is " + std::to_string(trace) + ", expected 1");
  }
  m_ = (m + m.adjoint()) * 0.5;
}

DensityMatrix DensityMatrix::physical(BipartiteDims dims, const ComplexMatrix& m) {
  DensityMatrix rho(dims, m);
  if (rho.min_eigenvalue() < -kPsdTol) throw InvalidInput("matrix is not positive semidefinite");
  return rho;
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

GellMannBasis::GellMannBasis(int d) : d_(d) {
  if (d < 2) throw InvalidDimension("Gell-Mann basis needs d >= 2");
  matrices_.reserve(static_cast<std::size_t>(d) * d - 1);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(d, d);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      matrices_.push_back(std::move(s));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(d, d);
      s(j, k) = cd(0.0, -1.0);
      s(k, j) = cd(0.0, 1.0);
      matrices_.push_back(std::move(s));
    }
  }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) s(j, j) = norm;
    s(l, l) = -l * norm;
    matrices_.push_back(std::move(s));
  }
}

GellMannBasis gell_mann_basis(int d) { return GellMannBasis(d); }

const GellMannBasis& cached_gell_mann_basis(int d) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GellMannBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<GellMannBasis>(d);
  return *slot;
}

ComplexMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw InvalidDimension("unitary dimension must be >= 1");
  ComplexMatrix z(d, d);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) z(r, c) = cd(rng.normal() * scale, rng.normal() * scale);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& packed = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const cd rjj = packed(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

Eigen::VectorXd dirichlet_simplex(int d, double theta, Rng& rng) {
  if (d < 1) throw InvalidDimension("simplex dimension must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw InvalidParameter("theta must lie in (0, 1), got " + std::to_string(theta));
  }
  Eigen::VectorXd l(d);
  if (d == 1) {
    l(0) = 1.0;
    return l;
  }
  const double concentration = 1.0 - theta;
  double sum = 0.0;
  // Tiny shapes can underflow every draw to zero; redraw in that case.
  while (!(sum > 0.0)) {
    for (int i = 0; i < d; ++i) l(i) = rng.gamma(concentration);
    sum = l.sum();
  }
  return l / sum;
}

SpectralDraw random_density_matrix_with_spectrum(const BipartiteDims& dims, double theta,
                                                 Rng& rng) {
  const int d = dims.total();
  Eigen::VectorXd l = dirichlet_simplex(d, theta, rng);
  const ComplexMatrix u = haar_unitary(d, rng);
  ComplexMatrix m = u * l.cast<cd>().asDiagonal() * u.adjoint();
  m /= m.trace().real();
  return {DensityMatrix::physical(dims, m), std::move(l)};
}

DensityMatrix random_density_matrix(const BipartiteDims& dims, double theta, Rng& rng) {
  return random_density_matrix_with_spectrum(dims, theta, rng).rho;
}

DensityMatrix random_pure_product(const BipartiteDims& dims, Rng& rng) {
  const Eigen::VectorXcd a = haar_unitary(dims.d_a(), rng).col(0);
  const Eigen::VectorXcd b = haar_unitary(dims.d_b(), rng).col(0);
  Eigen::VectorXcd psi(dims.total());
  for (int i = 0; i < dims.d_a(); ++i) psi.segment(i * dims.d_b(), dims.d_b()) = a(i) * b;
  psi.normalize();
  return DensityMatrix::physical(dims, psi * psi.adjoint());
}

Eigen::VectorXd bloch_coordinates(const ComplexMatrix& m) {
  const int d = static_cast<int>(m.rows());
  if (d < 2 || m.cols() != d) throw InvalidDimension("expected a square matrix of size >= 2");
  const GellMannBasis& basis = cached_gell_mann_basis(d);
  const double prefactor = std::sqrt(d / (2.0 * (d - 1)));
  Eigen::VectorXd x(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    // Tr[m s] = sum_{jk} m_jk s_kj
    const cd t = m.cwiseProduct(basis[i].transpose()).sum();
    if (std::abs(t.imag()) > 1e-8) throw CorruptedInput("non-real Gell-Mann coordinate");
    x(static_cast<Eigen::Index>(i)) = prefactor * t.real();
  }
  return x;
}

ComplexMatrix from_bloch_coordinates(const Eigen::VectorXd& x, int d) {
  if (d < 2) throw InvalidDimension("Bloch coordinates need d >= 2");
  const GellMannBasis& basis = cached_gell_mann_basis(d);
  if (x.size() != static_cast<Eigen::Index>(basis.size())) {
    throw InvalidDimension("feature vector length " + std::to_string(x.size()) +
                           " does not match d^2-1 = " + std::to_string(basis.size()));
  }
  const double scale = std::sqrt(d * (d - 1) / 2.0);
  ComplexMatrix m = ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    m += (scale * x(static_cast<Eigen::Index>(i))) * basis[i];
  }
  return m / static_cast<double>(d);
}

FeatureVector to_feature(const DensityMatrix& rho) {
  return {rho.dims(), bloch_coordinates(rho.matrix())};
}

DensityMatrix from_feature(const FeatureVector& x) {
  return DensityMatrix(x.dims, from_bloch_coordinates(x.coords, x.dims.total()));
}

ComplexMatrix partial_transpose(const BipartiteDims& dims, const ComplexMatrix& m) {
  const int da = dims.d_a();
  const int db = dims.d_b();
  ComplexMatrix out(m.rows(), m.cols());
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out.block(j * db, i * db, db, db) = m.block(i * db, j * db, db, db);
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho) {
  return partial_transpose(rho.dims(), rho.matrix());
}

double min_partial_transpose_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(partial_transpose(rho), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_ppt(const DensityMatrix& rho, double tol) {
  return min_partial_transpose_eigenvalue(rho) >= -tol;
}

DensityMatrix bell_phi_plus() {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix(BipartiteDims(2, 2), psi * psi.adjoint());
}

DensityMatrix werner_state(double p) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix m = p * (psi * psi.adjoint()) + ((1.0 - p) / 4.0) * ComplexMatrix::Identity(4, 4);
  return DensityMatrix(BipartiteDims(2, 2), m);
}

DensityMatrix maximally_mixed(const BipartiteDims& dims) {
  const int d = dims.total();
  return DensityMatrix(dims, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

}  // namespace qsep::state
