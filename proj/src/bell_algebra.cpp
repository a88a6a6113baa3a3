#include "qpa/bell_algebra.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qpa/error.hpp"

namespace qpa {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NoThreshold: return "NO_THRESHOLD";
    case ErrorCode::InsufficientTail: return "INSUFFICIENT_TAIL";
    case ErrorCode::Halt: return "HALT";
    case ErrorCode::Verification: return "VERIFICATION";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

const char* bell_name(BellLabel label) noexcept {
  static constexpr const char* kNames[4] = {"Phi+", "Psi+", "Phi-", "Psi-"};
  return kNames[label.index()];
}

Matrix2c pauli_matrix(Pauli p) {
  const Complex i{0.0, 1.0};
  Matrix2c m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i, i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return out;
}

Vector4c bell_vector(BellLabel b) {
  const double s = 1.0 / std::sqrt(2.0);
  const double sign = b.phase() ? -1.0 : 1.0;
  Vector4c v = Vector4c::Zero();
  if (b.amplitude() == 0) {
    v(0) = s;         // |00>
    v(3) = sign * s;  // |11>
  } else {
    v(1) = s;         // |01>
    v(2) = sign * s;  // |10>
  }
  return v;
}

Matrix4c bell_projector(BellLabel b) {
  const Vector4c v = bell_vector(b);
  return v * v.adjoint();
}

Matrix4c bell_basis() {
  Matrix4c basis;
  for (unsigned k = 0; k < 4; ++k) basis.col(k) = bell_vector(BellLabel::from_index(k));
  return basis;
}

DenseTwoQubitState::DenseTwoQubitState(const Matrix4c& rho) : rho_(rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kDenseTolerance) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian (deviation " << herm << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex{1.0, 0.0}) > kDenseTolerance) {
    std::ostringstream msg;
    msg << "density matrix trace is " << tr.real() << ", expected 1";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    fail(ErrorCode::InvalidArgument, "density matrix is not positive semidefinite");
  }
}

Matrix4c DenseTwoQubitState::in_bell_basis() const {
  const Matrix4c basis = bell_basis();
  return basis.adjoint() * rho_ * basis;
}

DenseTwoQubitState twirl(const DenseTwoQubitState& rho) {
  Matrix4c out = Matrix4c::Zero();
  for (Pauli p : kAllPaulis) {
    const Matrix2c s = pauli_matrix(p);
    const Matrix4c u = kron(s, s);
    out += u * rho.matrix() * u.adjoint();
  }
  return DenseTwoQubitState(out / 4.0);
}

}  // namespace qpa
