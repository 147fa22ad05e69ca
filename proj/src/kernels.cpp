#include "gpflow/kernels.hpp"

#include <atomic>

namespace gpflow::kernels {
namespace {

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{best_available()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = nullptr;
  if (name == "scalar") {
    t = &scalar_table();
  } else if (name == "avx2") {
    t = avx2_table();
  } else if (name == "auto") {
    t = best_available();
  }
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace gpflow::kernels
