#include "doctest.h"
#include "qpa/lab_demon.hpp"

using namespace qpa;

namespace {
ErrorFlag flag(unsigned p, unsigned a) { return ErrorFlag{p, a}; }
}  // namespace

TEST_CASE("single-qubit records") {
  CHECK(record_error(flag(0, 0), Pauli::X) == flag(0, 1));
  CHECK(record_error(flag(1, 1), Pauli::Y) == flag(0, 0));
  CHECK(record_error(flag(0, 1), Pauli::I) == flag(0, 1));
  CHECK(record_error(flag(0, 0), Pauli::Z) == flag(1, 0));
}

TEST_CASE("two-sided records") {
  CHECK(record_two_sided(flag(0, 0), Pauli::X, Pauli::X) == flag(0, 0));
  CHECK(record_two_sided(flag(0, 0), Pauli::Z, Pauli::I) == flag(1, 0));
  CHECK(record_two_sided(flag(0, 1), Pauli::Y, Pauli::Z) == flag(0, 0));
}

TEST_CASE("flag update examples") {
  CHECK(flag_update(flag(0, 0), flag(1, 1)) == flag(1, 0));
  CHECK(flag_update(flag(1, 0), flag(0, 1)) == flag(1, 1));
  CHECK(flag_update(flag(1, 1), flag(1, 1)) == flag(0, 0));
}

TEST_CASE("flag table, all sixteen entries") {
  // Rows: kept control flag (00, 01, 10, 11); columns: measured target flag.
  const char* expected[4][4] = {
      {"00", "00", "00", "10"},
      {"00", "01", "11", "00"},
      {"00", "11", "01", "00"},
      {"10", "00", "00", "00"},
  };
  for (unsigned r = 0; r < 4; ++r)
    for (unsigned c = 0; c < 4; ++c) {
      const auto out = flag_update(ErrorFlag::from_index(r), ErrorFlag::from_index(c));
      const unsigned want = (expected[r][c][0] - '0') * 2 + (expected[r][c][1] - '0');
      CAPTURE(r);
      CAPTURE(c);
      CHECK(out.index() == want);
    }
}

TEST_CASE("custom table is honoured") {
  FlagTable t = kFlagTable;
  t[2][1] = 0;
  CHECK(flag_update(flag(1, 0), flag(0, 1), t) == flag(0, 0));
}
