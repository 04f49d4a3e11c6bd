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

// Random bipartite states, the generalized Gell-Mann feature map and the
// partial-transpose test.

#ifndef QSEP_STATEKIT_HPP_
#define QSEP_STATEKIT_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qsep/common.hpp"

namespace qsep::state {

using ComplexMatrix = Eigen::MatrixXcd;

// Tolerances of the DensityMatrix invariants.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

class BipartiteDims {
 public:
  BipartiteDims(int d_a, int d_b);

  // Parses "2x2", "3x3", "2x3", ...
  static BipartiteDims parse(const std::string& text);

  int d_a() const { return d_a_; }
  int d_b() const { return d_b_; }
  int total() const { return d_a_ * d_b_; }
  // d^2 - 1 with d = d_a * d_b.
  int feature_dim() const { return total() * total() - 1; }
  std::string str() const;

  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;

 private:
  int d_a_;
  int d_b_;
};

// Hermitian unit-trace matrix on C^{d_a} (x) C^{d_b}. Hermiticity and trace are
// checked on construction; positivity is only checked by physical(), because
// from_feature() can legitimately produce non-positive matrices.
class DensityMatrix {
 public:
  // Throws InvalidInput when `m` is not Hermitian or trace one. The stored
  // matrix is symmetrized as (m + m^dagger) / 2.
  DensityMatrix(BipartiteDims dims, const ComplexMatrix& m);

  // As the constructor, additionally requiring min eigenvalue >= -kPsdTol.
  static DensityMatrix physical(BipartiteDims dims, const ComplexMatrix& m);

  const BipartiteDims& dims() const { return dims_; }
  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return dims_.total(); }

  double min_eigenvalue() const;
  double purity() const;

 private:
  BipartiteDims dims_;
  ComplexMatrix m_;
};

// Ordered generalized Gell-Mann matrices for dimension d: the d(d-1)/2
// symmetric ones, then the d(d-1)/2 antisymmetric ones, each block in
// lexicographic (j, k) order with j < k, then the d-1 diagonal ones.
// Normalization Tr[s_i s_j] = 2 delta_ij.
class GellMannBasis {
 public:
  explicit GellMannBasis(int d);

  int dim() const { return d_; }
  std::size_t size() const { return matrices_.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return matrices_[i]; }
  const std::vector<ComplexMatrix>& matrices() const { return matrices_; }

 private:
  int d_;
  std::vector<ComplexMatrix> matrices_;
};

GellMannBasis gell_mann_basis(int d);

// Shared immutable basis instance for dimension d.
const GellMannBasis& cached_gell_mann_basis(int d);

struct FeatureVector {
  BipartiteDims dims;
  Eigen::VectorXd coords;
};

// Haar-distributed d x d unitary: QR of a complex Ginibre matrix with the
// phases of diag(R) moved into Q.
ComplexMatrix haar_unitary(int d, Rng& rng);

// Point on the probability simplex with density proportional to
// prod(l_i)^(-theta), i.e. symmetric Dirichlet with concentration 1 - theta.
// Requires theta in (0, 1).
Eigen::VectorXd dirichlet_simplex(int d, double theta, Rng& rng);

struct SpectralDraw {
  DensityMatrix rho;
  Eigen::VectorXd spectrum;
};

// U diag(l) U^dagger with U Haar and l from dirichlet_simplex. The _with_spectrum
// variant also returns the drawn eigenvalues.
DensityMatrix random_density_matrix(const BipartiteDims& dims, double theta, Rng& rng);
SpectralDraw random_density_matrix_with_spectrum(const BipartiteDims& dims, double theta, Rng& rng);

// |a><a| (x) |b><b| with |a>, |b> the first columns of Haar unitaries.
DensityMatrix random_pure_product(const BipartiteDims& dims, Rng& rng);

// Feature map on a bare d x d matrix, any d >= 2. to_feature/from_feature
// apply these to the full d_a*d_b system.
Eigen::VectorXd bloch_coordinates(const ComplexMatrix& m);
ComplexMatrix from_bloch_coordinates(const Eigen::VectorXd& x, int d);

// x_i = sqrt(d / (2(d-1))) Tr[rho s_i]. Throws CorruptedInput when some trace
// has an imaginary part above 1e-8.
FeatureVector to_feature(const DensityMatrix& rho);

// rho = (I + sqrt(d(d-1)/2) x.s) / d. Positivity is not guaranteed.
DensityMatrix from_feature(const FeatureVector& x);

// Transposes subsystem A: entry ((i,k),(j,l)) -> ((j,k),(i,l)).
ComplexMatrix partial_transpose(const BipartiteDims& dims, const ComplexMatrix& m);
ComplexMatrix partial_transpose(const DensityMatrix& rho);

double min_partial_transpose_eigenvalue(const DensityMatrix& rho);

bool is_ppt(const DensityMatrix& rho, double tol = kPsdTol);

// Reference states used by tests and the CLI.
DensityMatrix bell_phi_plus();
// p |psi-><psi-| + (1 - p) I / 4.
DensityMatrix werner_state(double p);
DensityMatrix maximally_mixed(const BipartiteDims& dims);

}  // namespace qsep::state

#endif  // QSEP_STATEKIT_HPP_
