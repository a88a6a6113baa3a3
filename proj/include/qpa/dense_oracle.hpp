#pragma once

// Brute-force density-matrix reference for the protocol's label algebra and
// for one full noisy purification round.
//
// Two-pair states use the qubit order (Alice-control, Alice-target,
// Bob-control, Bob-target); basis index 8*ac + 4*at + 2*bc + bt.
// One-pair states use |alice bob>, index 2*alice + bob.

#include <array>
#include <optional>

#include "qpa/bell_algebra.hpp"
#include "qpa/lab_demon.hpp"
#include "qpa/noise_model.hpp"
#include "qpa/recurrence.hpp"

namespace qpa::oracle {

using Matrix16c = Eigen::Matrix<Complex, 16, 16>;

struct ProtocolUnitaries {
  Matrix4c rotation;  // per pair, on (alice, bob)
  Matrix16c bcnot;    // CNOT(ac -> at) on Alice's side, CNOT(bc -> bt) on Bob's
};

ProtocolUnitaries build_protocol_unitaries();

/// control (x) target, reordered into the two-pair qubit order.
Matrix16c embed_pairs(const Matrix4c& control, const Matrix4c& target);

/// Projects the target pair onto coinciding z outcomes (|00><00| + |11><11|
/// on at, bt) and traces it out. The result is unnormalized; its trace is the
/// keep probability.
Matrix4c keep_on_coincidence(const Matrix16c& rho);

/// The Bell label whose projector has fidelity 1 (within 1e-12) with `rho`.
/// Throws Error(Verification) if there is none.
BellLabel identify_bell(const Matrix4c& rho);
BellPair identify_bell_pair(const Matrix16c& rho);

struct LabelMaps {
  std::array<BellLabel, 4> rotation;
  std::array<BellPair, 16> bcnot;        // index source * 4 + target
  std::array<BellLabel, 64> two_sided;   // index bell * 16 + alice * 4 + bob
  std::array<bool, 4> coincides;
};

/// Conjugates every Bell projector (or pair of projectors) by the protocol
/// unitaries and identifies the resulting Bell state.
LabelMaps derive_label_maps();

/// Flag-combination entries implied by propagating errors through the dense
/// protocol: for flags (f1, f2) read as error labels, the entry is the Bell
/// label of the kept pair, or empty when the pair would be discarded.
/// Index kept * 4 + measured.
std::array<std::optional<ErrorFlag>, 16> derive_flag_table();

struct OracleRound {
  SubensembleState state;
  double keep_probability;
  double max_off_diagonal;  // largest Bell-basis off-diagonal of the kept subensembles
};

/// Full density-matrix round: explicit Kraus sums per pair, dense rotation
/// and BCNOT, projective post-selection and partial trace. Flags ride along
/// as classical labels and combine through `flag_update`.
OracleRound oracle_one_round(const SubensembleState& p, const NoiseModel& noise,
                             NoisePlacement placement = NoisePlacement::BeforeRotation,
                             const FlagTable& table = kFlagTable);

}  // namespace qpa::oracle
