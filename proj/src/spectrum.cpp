#include "clband/spectrum.hpp"

#include <algorithm>
#include <bit>

namespace clband {

std::string to_string(Policy p) { return p == Policy::EFF ? "eff" : "elf"; }

Policy policy_from_string(const std::string& s) {
  if (s == "eff" || s == "EFF") return Policy::EFF;
  if (s == "elf" || s == "ELF") return Policy::ELF;
  throw std::invalid_argument("unknown spectrum policy '" + s + "' (expected eff or elf)");
}

namespace {

// Mask of bits [lo, hi) within one 64-bit word, 0 <= lo < hi <= 64.
std::uint64_t word_mask(int lo, int hi) {
  const std::uint64_t upper = hi == 64 ? ~0ULL : ((1ULL << hi) - 1);
  return upper & ~((1ULL << lo) - 1);
}

}  // namespace

SpectrumState::SpectrumState(int links, int c_slots, int l_slots, int alignment)
    : c_slots_(c_slots), l_slots_(l_slots), alignment_(alignment) {
  if (links < 1) throw std::invalid_argument("spectrum needs at least one link");
  if (c_slots < 0 || l_slots < 0 || c_slots + l_slots < 1) {
    throw std::invalid_argument("spectrum needs at least one slot");
  }
  if (alignment < 1) throw std::invalid_argument("alignment must be positive");
  words_ = static_cast<std::size_t>((c_slots + l_slots + 63) / 64);
  bitmaps_.assign(static_cast<std::size_t>(links), std::vector<std::uint64_t>(words_, 0));
  scratch_.assign(words_, 0);
}

bool SpectrumState::is_free(int link, int slot) const {
  if (slot < 0 || slot >= total_slots()) throw std::out_of_range("slot out of range");
  const auto& b = bitmaps_.at(static_cast<std::size_t>(link));
  return ((b[static_cast<std::size_t>(slot / 64)] >> (slot % 64)) & 1ULL) == 0;
}

const std::vector<int>& SpectrumState::scan_order(Policy policy, int n_slots) const {
  const long key = static_cast<long>(n_slots) * 2 + (policy == Policy::ELF ? 1 : 0);
  auto it = scan_cache_.find(key);
  if (it != scan_cache_.end()) return it->second;
  std::vector<int> c_starts;
  std::vector<int> l_starts;
  for (int s = 0; s + n_slots <= c_slots_; s += alignment_) c_starts.push_back(s);
  for (int s = 0; s + n_slots <= l_slots_; s += alignment_) l_starts.push_back(c_slots_ + s);
  std::vector<int> order = c_starts;
  order.insert(order.end(), l_starts.begin(), l_starts.end());
  if (policy == Policy::ELF) std::reverse(order.begin(), order.end());
  return scan_cache_.emplace(key, std::move(order)).first->second;
}

bool SpectrumState::window_free(const std::vector<std::uint64_t>& mask, int first, int n) const {
  int pos = first;
  const int end = first + n;
  while (pos < end) {
    const int w = pos / 64;
    const int lo = pos % 64;
    const int hi = std::min(64, lo + (end - pos));
    if (mask[static_cast<std::size_t>(w)] & word_mask(lo, hi)) return false;
    pos += hi - lo;
  }
  return true;
}

std::optional<int> SpectrumState::find(std::span<const int> route, int n_slots,
                                       Policy policy) const {
  if (n_slots < 1) throw std::invalid_argument("window must hold at least one slot");
  if (route.empty()) throw std::invalid_argument("route has no links");
  std::fill(scratch_.begin(), scratch_.end(), 0);
  for (int link : route) {
    const auto& b = bitmaps_.at(static_cast<std::size_t>(link));
    for (std::size_t w = 0; w < words_; ++w) scratch_[w] |= b[w];
  }
  for (int start : scan_order(policy, n_slots)) {
    if (window_free(scratch_, start, n_slots)) return start;
  }
  return std::nullopt;
}

void SpectrumState::set_range(std::vector<std::uint64_t>& bits, int first, int n, bool value) {
  int pos = first;
  const int end = first + n;
  while (pos < end) {
    const int w = pos / 64;
    const int lo = pos % 64;
    const int hi = std::min(64, lo + (end - pos));
    if (value) {
      bits[static_cast<std::size_t>(w)] |= word_mask(lo, hi);
    } else {
      bits[static_cast<std::size_t>(w)] &= ~word_mask(lo, hi);
    }
    pos += hi - lo;
  }
}

void SpectrumState::allocate(std::uint64_t lightpath, std::span<const int> route, int first_slot,
                             int n_slots) {
  if (owners_.contains(lightpath)) throw SpectrumError("lightpath id already allocated");
  if (n_slots < 1 || first_slot < 0 || first_slot + n_slots > total_slots()) {
    throw SpectrumError("window outside the spectrum");
  }
  const bool in_c = first_slot + n_slots <= c_slots_;
  const bool in_l = first_slot >= c_slots_;
  if (!in_c && !in_l) throw SpectrumError("window crosses the band boundary");
  for (int link : route) {
    if (!window_free(bitmaps_.at(static_cast<std::size_t>(link)), first_slot, n_slots)) {
      throw SpectrumError("slot overlap on link " + std::to_string(link));
    }
  }
  for (int link : route) set_range(bitmaps_[static_cast<std::size_t>(link)], first_slot, n_slots, true);
  owners_.emplace(lightpath, Allocation{std::vector<int>(route.begin(), route.end()), first_slot, n_slots});
}

void SpectrumState::release(std::uint64_t lightpath) {
  const auto it = owners_.find(lightpath);
  if (it == owners_.end()) throw SpectrumError("unknown lightpath");
  const Allocation& a = it->second;
  for (int link : a.links) set_range(bitmaps_[static_cast<std::size_t>(link)], a.first, a.n, false);
  owners_.erase(it);
}

int SpectrumState::occupied(int link) const {
  int count = 0;
  for (std::uint64_t w : bitmaps_.at(static_cast<std::size_t>(link))) count += std::popcount(w);
  return count;
}

bool SpectrumState::empty() const {
  for (const auto& b : bitmaps_) {
    for (std::uint64_t w : b) {
      if (w != 0) return false;
    }
  }
  return true;
}

}  // namespace clband
