#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flatfold/geometry.hpp"
#include "flatfold/graph.hpp"

namespace flatfold {

enum class Fold : std::uint8_t { valley, mountain, flat };

inline char fold_letter(Fold f) {
  switch (f) {
    case Fold::valley:
      return 'V';
    case Fold::mountain:
      return 'M';
    case Fold::flat:
      return 'F';
  }
  return '?';
}

enum class UnsatKind : std::uint8_t {
  closure_violation,
  flat_count_violation,
  totals_mismatch,
  flow_shortfall,
  diameter_nesting_violation,
  no_valid_assignment,  // brute force found nothing
};

inline const char* to_string(UnsatKind k) {
  switch (k) {
    case UnsatKind::closure_violation:
      return "closure violation";
    case UnsatKind::flat_count_violation:
      return "flat-angle count violation";
    case UnsatKind::totals_mismatch:
      return "totals mismatch";
    case UnsatKind::flow_shortfall:
      return "flow shortfall";
    case UnsatKind::diameter_nesting_violation:
      return "diameter nesting violation";
    case UnsatKind::no_valid_assignment:
      return "no valid assignment";
  }
  return "unknown";
}

struct UnsatReason {
  UnsatKind kind = UnsatKind::no_valid_assignment;
  ComponentId component = no_id;
  VertexId vertex = no_id;
  EdgeId edge = no_id;
  FaceId face = no_id;
  std::size_t flat_count = 0;
  std::int64_t flow_value = 0;
  std::int64_t total_red = 0;
  std::int64_t total_blue = 0;
  Rational child_diameter;
  Rational parent_diameter;
  bool exterior_conflict = false;  // every face of maximal extent hosts a child
};

struct DecideStats {
  std::size_t angles = 0;
  std::size_t clauses = 0;
  std::size_t variables = 0;
  std::int64_t flow_value = 0;
};

struct Verdict {
  bool sat = false;
  std::vector<Fold> witness;           // per angle id (SAT only)
  std::optional<CoordinateMap> coords;
  std::vector<FaceId> exteriors;       // per component; no_id for edgeless components
  std::optional<UnsatReason> reason;   // UNSAT only
  DecideStats stats;
};

}  // namespace flatfold
