#pragma once

#include <string>

namespace rfr {

enum class RowKind { VoltageUpper, VoltageLower, BoxUpper, BoxLower, Hull };

const char* to_string(RowKind kind);

/// Provenance of one half-space row.
struct RowLabel {
  RowKind kind = RowKind::Hull;
  std::string element;  // bus id for voltage rows, customer id for box rows
  int phase = -1;       // 0..2 for voltage rows
  int iteration = 0;    // 0 = nominal region, k = cut added in outer iteration k
  int solution = -1;    // index of the worst-case solution that produced the cut

  /// Customer box rows do not depend on network impedances.
  bool certain() const { return kind == RowKind::BoxUpper || kind == RowKind::BoxLower; }
  std::string to_string() const;

  friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

}  // namespace rfr
