#pragma once

#include <array>
#include <cstdint>

namespace droplab::detail {

__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

// Little-endian 256-bit unsigned integer, enough for exact ratio
// comparisons of squared 128-bit values.
struct U256 {
  std::array<std::uint64_t, 4> limbs{};

  static U256 from(u128 v) {
    U256 out;
    out.limbs[0] = static_cast<std::uint64_t>(v);
    out.limbs[1] = static_cast<std::uint64_t>(v >> 64);
    return out;
  }

  // Truncating product.
  friend U256 operator*(const U256& a, const U256& b) {
    U256 out;
    for (int i = 0; i < 4; ++i) {
      std::uint64_t carry = 0;
      for (int j = 0; i + j < 4; ++j) {
        const u128 cur = static_cast<u128>(a.limbs[i]) * b.limbs[j] + out.limbs[i + j] + carry;
        out.limbs[i + j] = static_cast<std::uint64_t>(cur);
        carry = static_cast<std::uint64_t>(cur >> 64);
      }
    }
    return out;
  }

  friend bool operator<(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i) {
      if (a.limbs[i] != b.limbs[i]) return a.limbs[i] < b.limbs[i];
    }
    return false;
  }
};

}  // namespace droplab::detail
