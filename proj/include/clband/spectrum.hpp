#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace clband {

enum class Policy { EFF, ELF };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& s);

class SpectrumError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Slot occupancy of every link. Slots [0, c_slots) form the C band and
// [c_slots, c_slots + l_slots) the L band; a window never crosses the band
// boundary and starts at a multiple of `alignment` from its band start.
class SpectrumState {
 public:
  SpectrumState(int links, int c_slots, int l_slots, int alignment);

  int links() const { return static_cast<int>(bitmaps_.size()); }
  int total_slots() const { return c_slots_ + l_slots_; }
  int c_slots() const { return c_slots_; }
  int l_slots() const { return l_slots_; }
  int alignment() const { return alignment_; }

  bool is_free(int link, int slot) const;
  // First free window of `n_slots` on every link of `route` in the policy's
  // scan order: EFF ascending through C then L, ELF descending through L then C.
  std::optional<int> find(std::span<const int> route, int n_slots, Policy policy) const;

  // Marks [first_slot, first_slot + n_slots) busy on every route link.
  // Throws SpectrumError if any slot is already owned.
  void allocate(std::uint64_t lightpath, std::span<const int> route, int first_slot, int n_slots);
  // Frees exactly the slots taken by `lightpath`.
  void release(std::uint64_t lightpath);

  int occupied(int link) const;
  std::size_t active() const { return owners_.size(); }
  bool empty() const;

  // Candidate window starts in scan order.
  const std::vector<int>& scan_order(Policy policy, int n_slots) const;

 private:
  struct Allocation {
    std::vector<int> links;
    int first = 0;
    int n = 0;
  };

  bool window_free(const std::vector<std::uint64_t>& mask, int first, int n) const;
  void set_range(std::vector<std::uint64_t>& bits, int first, int n, bool value);

  int c_slots_;
  int l_slots_;
  int alignment_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> bitmaps_;  // set bit = busy
  std::unordered_map<std::uint64_t, Allocation> owners_;
  mutable std::unordered_map<long, std::vector<int>> scan_cache_;
  mutable std::vector<std::uint64_t> scratch_;
};

}  // namespace clband
