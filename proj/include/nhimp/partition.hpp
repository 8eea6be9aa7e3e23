#pragma once

#include <string>

namespace nhimp {

enum class PartitionKind { I, II };

/// Subsystem A. Kind I holds sites 1..L_A next to the impurity bond, kind II
/// holds sites L_0+1..L_0+L_A.
struct Partition {
  PartitionKind kind = PartitionKind::I;
  int LA = 0;
  int L0 = 0;

  int first_site() const noexcept { return kind == PartitionKind::I ? 1 : L0 + 1; }
  int last_site() const noexcept { return first_site() + LA - 1; }

  /// Throws InvalidArgument for L_A < 1, L_0 < 0, or L_0 != 0 on kind I.
  void validate() const;

  static Partition kind_I(int LA) { return {PartitionKind::I, LA, 0}; }
  static Partition kind_II(int LA, int L0) { return {PartitionKind::II, LA, L0}; }
};

std::string to_string(PartitionKind kind);
PartitionKind parse_partition_kind(const std::string& text);

}  // namespace nhimp
