#include "nhimp/partition.hpp"

#include "nhimp/errors.hpp"

namespace nhimp {

void Partition::validate() const {
  if (LA < 1) throw InvalidArgument("partition: L_A must be positive");
  if (L0 < 0) throw InvalidArgument("partition: L_0 must be nonnegative");
  if (kind == PartitionKind::I && L0 != 0) throw InvalidArgument("partition: L_0 is only meaningful for kind II");
}

std::string to_string(PartitionKind kind) { return kind == PartitionKind::I ? "I" : "II"; }

PartitionKind parse_partition_kind(const std::string& text) {
  if (text == "I" || text == "1") return PartitionKind::I;
  if (text == "II" || text == "2") return PartitionKind::II;
  throw InvalidArgument("partition must be I or II, got '" + text + "'");
}

}  // namespace nhimp
