#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netfuzz {

std::string hex_encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> hex_decode(std::string_view hex);  // throws BadFormat

std::string base64_encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> base64_decode(std::string_view b64);  // throws BadFormat

// Pack a 0/1-per-entry bit vector LSB-first into bytes, and back.
std::vector<uint8_t> pack_bits(std::span<const uint8_t> bits);
std::vector<uint8_t> unpack_bits(std::span<const uint8_t> bytes, size_t nbits);

uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

std::string read_file(const std::string& path);  // throws FileNotFound
// Write via temp file + rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, std::string_view content);

}  // namespace netfuzz
