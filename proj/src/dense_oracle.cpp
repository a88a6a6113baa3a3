#include "qpa/dense_oracle.hpp"

#include <sstream>

#include "qpa/error.hpp"

namespace qpa::oracle {
namespace {

constexpr unsigned two_pair_index(unsigned ac, unsigned at, unsigned bc, unsigned bt) {
  return 8 * ac + 4 * at + 2 * bc + bt;
}

Matrix4c cnot() {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace

ProtocolUnitaries build_protocol_unitaries() {
  const Complex i{0.0, 1.0};
  const Matrix2c id = Matrix2c::Identity();
  const Matrix2c x = pauli_matrix(Pauli::X);
  ProtocolUnitaries u;
  u.rotation = 0.5 * kron(id - i * x, id + i * x);

  // Alice's CNOT acts on (ac, at) and Bob's on (bc, bt): with the qubit order
  // (ac, at, bc, bt) the bilateral gate is a plain Kronecker product.
  const Matrix4c c = cnot();
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) u.bcnot.block<4, 4>(4 * r, 4 * s) = c(r, s) * c;

  if (unitarity_defect(u.rotation) > kDenseTolerance || unitarity_defect(u.bcnot) > kDenseTolerance) {
    fail(ErrorCode::Verification, "protocol unitaries are not unitary");
  }
  return u;
}

Matrix16c embed_pairs(const Matrix4c& control, const Matrix4c& target) {
  Matrix16c out;
  for (unsigned r = 0; r < 16; ++r) {
    const unsigned rac = (r >> 3) & 1u, rat = (r >> 2) & 1u, rbc = (r >> 1) & 1u, rbt = r & 1u;
    for (unsigned c = 0; c < 16; ++c) {
      const unsigned cac = (c >> 3) & 1u, cat = (c >> 2) & 1u, cbc = (c >> 1) & 1u, cbt = c & 1u;
      out(r, c) = control(2 * rac + rbc, 2 * cac + cbc) * target(2 * rat + rbt, 2 * cat + cbt);
    }
  }
  return out;
}

Matrix4c keep_on_coincidence(const Matrix16c& rho) {
  Matrix4c kept = Matrix4c::Zero();
  for (unsigned x = 0; x < 2; ++x) {
    for (unsigned ac = 0; ac < 2; ++ac)
      for (unsigned bc = 0; bc < 2; ++bc)
        for (unsigned ac2 = 0; ac2 < 2; ++ac2)
          for (unsigned bc2 = 0; bc2 < 2; ++bc2)
            kept(2 * ac + bc, 2 * ac2 + bc2) += rho(two_pair_index(ac, x, bc, x), two_pair_index(ac2, x, bc2, x));
  }
  return kept;
}

BellLabel identify_bell(const Matrix4c& rho) {
  for (unsigned k = 0; k < 4; ++k) {
    const BellLabel b = BellLabel::from_index(k);
    const double fid = (bell_projector(b) * rho).trace().real();
    if (std::abs(fid - 1.0) <= kDenseTolerance) return b;
  }
  fail(ErrorCode::Verification, "state is not a Bell projector");
}

BellPair identify_bell_pair(const Matrix16c& rho) {
  for (unsigned s = 0; s < 4; ++s) {
    for (unsigned t = 0; t < 4; ++t) {
      const BellPair pair{BellLabel::from_index(s), BellLabel::from_index(t)};
      const Matrix16c proj = embed_pairs(bell_projector(pair.source), bell_projector(pair.target));
      const double fid = (proj * rho).trace().real();
      if (std::abs(fid - 1.0) <= kDenseTolerance) return pair;
    }
  }
  fail(ErrorCode::Verification, "two-pair state is not a product of Bell projectors");
}

LabelMaps derive_label_maps() {
  const ProtocolUnitaries u = build_protocol_unitaries();
  LabelMaps maps{};
  for (unsigned k = 0; k < 4; ++k) {
    const BellLabel b = BellLabel::from_index(k);
    const Matrix4c proj = bell_projector(b);
    maps.rotation[k] = identify_bell(u.rotation * proj * u.rotation.adjoint());
    // z outcomes coincide with certainty iff the weight on |01>, |10> vanishes.
    const double anti = proj(1, 1).real() + proj(2, 2).real();
    maps.coincides[k] = anti < kDenseTolerance;
    for (Pauli a : kAllPaulis) {
      for (Pauli c : kAllPaulis) {
        const Matrix4c kraus = kron(pauli_matrix(a), pauli_matrix(c));
        maps.two_sided[k * 16 + static_cast<unsigned>(a) * 4 + static_cast<unsigned>(c)] =
            identify_bell(kraus * proj * kraus.adjoint());
      }
    }
  }
  for (unsigned s = 0; s < 4; ++s) {
    for (unsigned t = 0; t < 4; ++t) {
      const Matrix16c rho = embed_pairs(bell_projector(BellLabel::from_index(s)), bell_projector(BellLabel::from_index(t)));
      maps.bcnot[s * 4 + t] = identify_bell_pair(u.bcnot * rho * u.bcnot.adjoint());
    }
  }
  return maps;
}

std::array<std::optional<ErrorFlag>, 16> derive_flag_table() {
  const ProtocolUnitaries u = build_protocol_unitaries();
  std::array<std::optional<ErrorFlag>, 16> table;
  for (unsigned f1 = 0; f1 < 4; ++f1) {
    for (unsigned f2 = 0; f2 < 4; ++f2) {
      // A flag names the Bell state its pair is in when the record is exact.
      const Matrix4c c = u.rotation * bell_projector(BellLabel::from_index(f1)) * u.rotation.adjoint();
      const Matrix4c t = u.rotation * bell_projector(BellLabel::from_index(f2)) * u.rotation.adjoint();
      const Matrix16c rho = u.bcnot * embed_pairs(c, t) * u.bcnot.adjoint();
      const Matrix4c kept = keep_on_coincidence(rho);
      const double keep = kept.trace().real();
      if (keep < kDenseTolerance) continue;
      if (std::abs(keep - 1.0) > kDenseTolerance) {
        fail(ErrorCode::Verification, "flag derivation: coincidence is not deterministic");
      }
      const BellLabel b = identify_bell(kept);
      table[f1 * 4 + f2] = ErrorFlag::from_index(b.index());
    }
  }
  return table;
}

OracleRound oracle_one_round(const SubensembleState& p, const NoiseModel& noise, NoisePlacement placement,
                             const FlagTable& table) {
  const ProtocolUnitaries u = build_protocol_unitaries();

  // Per-pair: flag-conditioned (unnormalized) states after noise and rotation.
  std::array<Matrix4c, 4> noisy;
  for (auto& m : noisy) m.setZero();
  for (unsigned f = 0; f < 4; ++f) {
    Matrix4c rho = Matrix4c::Zero();
    for (unsigned b = 0; b < 4; ++b) rho += p.coefficients()[f * 4 + b] * bell_projector(BellLabel::from_index(b));
    if (rho.cwiseAbs().maxCoeff() == 0.0) continue;
    for (Pauli a : kAllPaulis) {
      for (Pauli c : kAllPaulis) {
        const double w = noise.probability(a, c);
        if (w == 0.0) continue;
        const Matrix4c kraus = kron(pauli_matrix(a), pauli_matrix(c));
        const Matrix4c op = placement == NoisePlacement::BeforeRotation ? Matrix4c(u.rotation * kraus)
                                                                        : Matrix4c(kraus * u.rotation);
        const ErrorFlag flag = record_two_sided(ErrorFlag::from_index(f), a, c);
        noisy[flag.index()] += w * op * rho * op.adjoint();
      }
    }
  }

  std::array<Matrix4c, 4> kept;
  for (auto& m : kept) m.setZero();
  double keep = 0.0;
  for (unsigned f1 = 0; f1 < 4; ++f1) {
    for (unsigned f2 = 0; f2 < 4; ++f2) {
      if (noisy[f1].trace().real() == 0.0 || noisy[f2].trace().real() == 0.0) continue;
      const Matrix16c rho = u.bcnot * embed_pairs(noisy[f1], noisy[f2]) * u.bcnot.adjoint();
      const Matrix4c k = keep_on_coincidence(rho);
      keep += k.trace().real();
      kept[flag_update(ErrorFlag::from_index(f1), ErrorFlag::from_index(f2), table).index()] += k;
    }
  }
  if (!(keep >= kDegenerateKeepProbability)) {
    std::ostringstream msg;
    msg << "oracle keep probability " << keep << " is below " << kDegenerateKeepProbability;
    fail(ErrorCode::Degenerate, msg.str());
  }

  const Matrix4c basis = bell_basis();
  std::array<double, 16> out{};
  double off = 0.0;
  for (unsigned f = 0; f < 4; ++f) {
    const Matrix4c in_bell = basis.adjoint() * (kept[f] / keep) * basis;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        if (r == c) out[f * 4 + r] = in_bell(r, c).real();
        else off = std::max(off, std::abs(in_bell(r, c)));
      }
    }
  }
  for (double& x : out) x = std::max(x, 0.0);
  return {SubensembleState::from_coefficients(out), keep, off};
}

}  // namespace qpa::oracle
