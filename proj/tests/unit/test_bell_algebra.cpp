#include <cmath>

#include "doctest.h"
#include "qpa/bell_algebra.hpp"
#include "qpa/error.hpp"

using namespace qpa;

namespace {

// Bell vectors written out by hand, independent of the library's table.
Vector4c hand_bell(BellLabel b) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector4c v = Vector4c::Zero();
  switch (b.index()) {
    case 0: v << s, 0, 0, s; break;    // Phi+
    case 1: v << 0, s, s, 0; break;    // Psi+
    case 2: v << s, 0, 0, -s; break;   // Phi-
    case 3: v << 0, s, -s, 0; break;   // Psi-
  }
  return v;
}

// Index of the hand-written Bell vector that U|b> coincides with up to phase.
unsigned conjugated_label(const Matrix4c& u, BellLabel b) {
  const Vector4c out = u * hand_bell(b);
  for (unsigned k = 0; k < 4; ++k) {
    if (std::abs(std::abs(hand_bell(BellLabel::from_index(k)).dot(out)) - 1.0) < 1e-12) return k;
  }
  return 99;
}

Matrix4c bilateral_rotation() {
  const Complex i(0, 1);
  Matrix2c id = Matrix2c::Identity();
  Matrix2c x = pauli_matrix(Pauli::X);
  return 0.5 * kron(id - i * x, id + i * x);
}

}  // namespace

TEST_CASE("pauli shifts") {
  CHECK(pauli_shift(Pauli::I) == LabelShift{0, 0});
  CHECK(pauli_shift(Pauli::X) == LabelShift{0, 1});
  CHECK(pauli_shift(Pauli::Y) == LabelShift{1, 1});
  CHECK(pauli_shift(Pauli::Z) == LabelShift{1, 0});
}

TEST_CASE("two-sided pauli action") {
  CHECK(apply_two_sided_pauli(kPhiPlus, Pauli::I, Pauli::I) == kPhiPlus);
  CHECK(apply_two_sided_pauli(kPhiPlus, Pauli::X, Pauli::I) == kPsiPlus);
  CHECK(apply_two_sided_pauli(kPsiMinus, Pauli::Z, Pauli::Z) == kPsiMinus);

  // Every (bell, alice, bob) against the matrix action.
  for (unsigned b = 0; b < 4; ++b)
    for (Pauli a : kAllPaulis)
      for (Pauli c : kAllPaulis) {
        const auto label = BellLabel::from_index(b);
        const Matrix4c u = kron(pauli_matrix(a), pauli_matrix(c));
        CHECK(conjugated_label(u, label) == apply_two_sided_pauli(label, a, c).index());
      }
}

TEST_CASE("bilateral rotation") {
  CHECK(rotate(kPhiPlus) == kPhiPlus);
  CHECK(rotate(kPhiMinus) == kPsiMinus);
  CHECK(rotate(kPsiPlus) == kPsiPlus);
  CHECK(rotate(kPsiMinus) == kPhiMinus);
  const Matrix4c u = bilateral_rotation();
  for (unsigned b = 0; b < 4; ++b) {
    CHECK(conjugated_label(u, BellLabel::from_index(b)) == rotate(BellLabel::from_index(b)).index());
  }
}

TEST_CASE("bilateral cnot") {
  CHECK(bcnot(kPhiPlus, kPhiPlus) == BellPair{kPhiPlus, kPhiPlus});
  CHECK(bcnot(kPsiMinus, kPhiPlus) == BellPair{kPsiMinus, kPsiPlus});
  CHECK(bcnot(kPhiMinus, kPsiMinus) == BellPair{kPhiPlus, kPsiMinus});

  // Bijection on the 16 label pairs.
  std::array<int, 16> seen{};
  for (unsigned s = 0; s < 4; ++s)
    for (unsigned t = 0; t < 4; ++t) {
      const auto r = bcnot(BellLabel::from_index(s), BellLabel::from_index(t));
      ++seen[r.source.index() * 4 + r.target.index()];
    }
  for (int n : seen) CHECK(n == 1);
}

TEST_CASE("coincidence") {
  CHECK(coincides(kPhiPlus));
  CHECK_FALSE(coincides(kPsiPlus));
  CHECK(coincides(kPhiMinus));
  CHECK_FALSE(coincides(kPsiMinus));
}

TEST_CASE("bell vectors") {
  for (unsigned b = 0; b < 4; ++b) {
    const auto label = BellLabel::from_index(b);
    CHECK((bell_vector(label) - hand_bell(label)).norm() < 1e-15);
  }
  const Matrix4c basis = bell_basis();
  CHECK((basis.adjoint() * basis - Matrix4c::Identity()).norm() < 1e-14);
  CHECK(std::string(bell_name(kPsiMinus)) == "Psi-");
}

TEST_CASE("dense state validation") {
  CHECK_NOTHROW(DenseTwoQubitState(bell_projector(kPhiPlus)));
  Matrix4c bad = bell_projector(kPhiPlus) * 2.0;
  CHECK_THROWS_AS(DenseTwoQubitState{bad}, Error);
  Matrix4c non_hermitian = Matrix4c::Zero();
  non_hermitian(0, 0) = 1.0;
  non_hermitian(0, 1) = 0.5;
  CHECK_THROWS_AS(DenseTwoQubitState{non_hermitian}, Error);
  Matrix4c negative = Matrix4c::Zero();
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DenseTwoQubitState{negative}, Error);
}

TEST_CASE("twirl") {
  const DenseTwoQubitState phi(bell_projector(kPhiPlus));
  CHECK((twirl(phi).matrix() - phi.matrix()).norm() < 1e-12);

  Matrix4c zz = Matrix4c::Zero();
  zz(0, 0) = 1.0;
  const Matrix4c expected = 0.5 * (bell_projector(kPhiPlus) + bell_projector(kPhiMinus));
  CHECK((twirl(DenseTwoQubitState(zz)).matrix() - expected).norm() < 1e-12);

  // A generic pure state: off-diagonals vanish in the Bell basis, diagonal kept.
  Vector4c psi;
  psi << Complex(0.3, 0.1), Complex(-0.5, 0.2), Complex(0.4, -0.3), Complex(0.1, 0.6);
  psi.normalize();
  const DenseTwoQubitState rho(psi * psi.adjoint());
  const Matrix4c out = twirl(rho).in_bell_basis();
  const Matrix4c in = rho.in_bell_basis();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      if (r == c) {
        CHECK(std::abs(out(r, c) - in(r, c)) < 1e-12);
      } else {
        CHECK(std::abs(out(r, c)) < 1e-12);
      }
    }
}
