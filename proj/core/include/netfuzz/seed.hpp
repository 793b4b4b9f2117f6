#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace netfuzz {

// A test stimulus: T cycles of width-bit input vectors. Bits are stored
// one per byte in cycle-major order; the hex form packs them LSB-first.
struct Seed {
  uint32_t width = 0;
  uint32_t T = 0;
  std::vector<uint8_t> bits;  // size width * T, values 0/1

  uint64_t id = 0;
  int64_t parent = -1;        // corpus id this was mutated from, -1 if fresh
  std::string op = "generated";

  uint8_t bit(uint32_t cycle, uint32_t input) const {
    return bits[static_cast<size_t>(cycle) * width + input];
  }
  void set_bit(uint32_t cycle, uint32_t input, uint8_t v) {
    bits[static_cast<size_t>(cycle) * width + input] = v;
  }
};

std::string seed_to_hex(const Seed& s);
Seed seed_from_hex(std::string_view hex, uint32_t width, uint32_t T);

}  // namespace netfuzz
