#include "coalog/error.hpp"

#include <atomic>

namespace coalog {

namespace {
std::atomic<std::uint64_t> g_limit{std::uint64_t{1} << 20};
}

std::uint64_t resource_limit() { return g_limit.load(std::memory_order_relaxed); }

void set_resource_limit(std::uint64_t limit) { g_limit.store(limit, std::memory_order_relaxed); }

void check_card(std::uint64_t card, const std::string& what) {
  if (card > resource_limit()) throw ResourceLimit(what, card);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > UINT64_MAX / b ? UINT64_MAX : a * b;
}

std::uint64_t sat_pow2(std::uint64_t exponent) {
  return exponent >= 64 ? UINT64_MAX : std::uint64_t{1} << exponent;
}

} // namespace coalog
