#pragma once

// Bell-label algebra for the recurrence purification protocol.
//
// A Bell state is named by two bits (phase, amplitude):
//   (0,0) = Phi+ = (|00> + |11>)/sqrt2     (0,1) = Psi+ = (|01> + |10>)/sqrt2
//   (1,0) = Phi- = (|00> - |11>)/sqrt2     (1,1) = Psi- = (|01> - |10>)/sqrt2
// Global phases are dropped throughout: every map here acts on projectors.

#include <array>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qpa {

/// Two classical bits read as (phase, amplitude). The tag keeps Bell labels,
/// error flags and shifts from being mixed up by accident.
template <class Tag>
class PhaseAmplitude {
 public:
  constexpr PhaseAmplitude() = default;
  constexpr PhaseAmplitude(unsigned phase, unsigned amplitude)
      : bits_(static_cast<std::uint8_t>(((phase & 1u) << 1) | (amplitude & 1u))) {}

  static constexpr PhaseAmplitude from_index(unsigned index) {
    return PhaseAmplitude(index >> 1, index);
  }

  constexpr unsigned phase() const { return bits_ >> 1; }
  constexpr unsigned amplitude() const { return bits_ & 1u; }
  /// Packed value `phase << 1 | amplitude`, in [0, 4).
  constexpr unsigned index() const { return bits_; }

  friend constexpr bool operator==(PhaseAmplitude, PhaseAmplitude) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct BellTag;
struct FlagTag;
struct ShiftTag;

using BellLabel = PhaseAmplitude<BellTag>;
using ErrorFlag = PhaseAmplitude<FlagTag>;
using LabelShift = PhaseAmplitude<ShiftTag>;

template <class Tag>
constexpr PhaseAmplitude<Tag> operator^(PhaseAmplitude<Tag> value, LabelShift shift) {
  return PhaseAmplitude<Tag>::from_index(value.index() ^ shift.index());
}

inline constexpr BellLabel kPhiPlus{0, 0};
inline constexpr BellLabel kPsiPlus{0, 1};
inline constexpr BellLabel kPhiMinus{1, 0};
inline constexpr BellLabel kPsiMinus{1, 1};

/// Short human-readable name ("Phi+", ...).
const char* bell_name(BellLabel label) noexcept;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 4> kAllPaulis{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

constexpr Pauli pauli_from_index(unsigned i) { return static_cast<Pauli>(i & 3u); }

/// Bell-label shift produced by applying a Pauli to one qubit of a pair:
/// x flips the amplitude bit, z the phase bit, y both.
constexpr LabelShift pauli_shift(Pauli p) {
  switch (p) {
    case Pauli::I: return LabelShift{0, 0};
    case Pauli::X: return LabelShift{0, 1};
    case Pauli::Y: return LabelShift{1, 1};
    case Pauli::Z: return LabelShift{1, 0};
  }
  return LabelShift{};
}

constexpr LabelShift two_sided_shift(Pauli alice, Pauli bob) {
  return pauli_shift(alice) ^ pauli_shift(bob);
}

constexpr BellLabel apply_two_sided_pauli(BellLabel b, Pauli alice, Pauli bob) {
  return b ^ two_sided_shift(alice, bob);
}

/// Relabeling induced by the bilateral rotation (1 - i sx)/sqrt2 (x) (1 + i sx)/sqrt2.
/// Fixes Phi+ and Psi+ and exchanges Phi- <-> Psi-.
constexpr BellLabel rotate(BellLabel b) {
  return BellLabel{b.phase(), b.amplitude() ^ b.phase()};
}

struct BellPair {
  BellLabel source;
  BellLabel target;

  friend constexpr bool operator==(const BellPair&, const BellPair&) = default;
};

/// Bilateral CNOT: phase bits flow target -> source, amplitude bits source -> target.
constexpr BellPair bcnot(BellLabel source, BellLabel target) {
  return BellPair{BellLabel{source.phase() ^ target.phase(), source.amplitude()},
                  BellLabel{target.phase(), source.amplitude() ^ target.amplitude()}};
}

/// z-measurements on both halves of `target` agree iff it is a Phi-type state.
constexpr bool coincides(BellLabel target) { return target.amplitude() == 0; }

// ---------------------------------------------------------------------------
// Dense two-qubit states. Basis |alice bob>, index 2*alice + bob.

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;

inline constexpr double kDenseTolerance = 1e-12;

Matrix2c pauli_matrix(Pauli p);
/// a (x) b, with `a` acting on the high (Alice) qubit.
Matrix4c kron(const Matrix2c& a, const Matrix2c& b);
Vector4c bell_vector(BellLabel b);
Matrix4c bell_projector(BellLabel b);
/// Columns are the Bell vectors in label-index order.
Matrix4c bell_basis();

/// A validated two-qubit density matrix: Hermitian and unit trace to 1e-12,
/// eigenvalues >= -1e-10.
class DenseTwoQubitState {
 public:
  explicit DenseTwoQubitState(const Matrix4c& rho);

  const Matrix4c& matrix() const { return rho_; }
  /// The same state expressed in the Bell basis.
  Matrix4c in_bell_basis() const;

 private:
  Matrix4c rho_;
};

/// (1/4) sum_k (s_k (x) s_k) rho (s_k (x) s_k): projects onto the Bell-diagonal part.
DenseTwoQubitState twirl(const DenseTwoQubitState& rho);

}  // namespace qpa
