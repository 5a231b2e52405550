#pragma once

#include <cstdint>

namespace spdsd {

// Analytic operation ledger. Every kernel charges a documented count of
// multiply-accumulates; counts never depend on the backend or thread count.
// A ledger is owned by one solver run; charges are made from the calling
// thread only, never from inside a parallel region.
class FlopLedger {
 public:
  void add(std::uint64_t flops) { flops_ += flops; }
  void add_f_entries(std::uint64_t entries) { f_entries_ += entries; }

  std::uint64_t count() const { return flops_; }
  // Number of entries of F(X) = B^-1 grad^R f(X) B^-T evaluated so far.
  std::uint64_t f_entries() const { return f_entries_; }

 private:
  std::uint64_t flops_ = 0;
  std::uint64_t f_entries_ = 0;
};

}  // namespace spdsd
