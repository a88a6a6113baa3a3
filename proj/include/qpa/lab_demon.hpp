#pragma once

// Error-flag bookkeeping. Each pair carries a flag (error phase bit, error
// amplitude bit) that records its Pauli history; when a control pair is kept,
// its new flag is a fixed function of the control and target flags.

#include <array>

#include "qpa/bell_algebra.hpp"

namespace qpa {

/// flag ^ pauli_shift(p): x flips the amplitude bit, z the phase bit, y both.
constexpr ErrorFlag record_error(ErrorFlag flag, Pauli p) { return flag ^ pauli_shift(p); }

constexpr ErrorFlag record_two_sided(ErrorFlag flag, Pauli alice, Pauli bob) {
  return flag ^ two_sided_shift(alice, bob);
}

/// Row = flag of the kept control pair, column = flag of the measured target
/// pair, both indexed by ErrorFlag::index(); entries are ErrorFlag indices.
using FlagTable = std::array<std::array<unsigned char, 4>, 4>;

inline constexpr FlagTable kFlagTable{{
    //        (00) (01) (10) (11)
    /*(00)*/ {0b00, 0b00, 0b00, 0b10},
    /*(01)*/ {0b00, 0b01, 0b11, 0b00},
    /*(10)*/ {0b00, 0b11, 0b01, 0b00},
    /*(11)*/ {0b10, 0b00, 0b00, 0b00},
}};

constexpr ErrorFlag flag_update(ErrorFlag kept, ErrorFlag measured, const FlagTable& table = kFlagTable) {
  return ErrorFlag::from_index(table[kept.index()][measured.index()]);
}

}  // namespace qpa
