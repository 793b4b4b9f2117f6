#include "netfuzz/util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netfuzz/error.hpp"

namespace netfuzz {

const char* Error::kind_name(Kind k) {
  switch (k) {
    case Kind::UnknownGate: return "UnknownGate";
    case Kind::UndefinedNet: return "UndefinedNet";
    case Kind::DuplicateDriver: return "DuplicateDriver";
    case Kind::CombinationalCycle: return "CombinationalCycle";
    case Kind::ArityViolation: return "ArityViolation";
    case Kind::TargetNotFound: return "TargetNotFound";
    case Kind::SeedWidthMismatch: return "SeedWidthMismatch";
    case Kind::ShapeMismatch: return "ShapeMismatch";
    case Kind::GraphMismatch: return "GraphMismatch";
    case Kind::EmptyMask: return "EmptyMask";
    case Kind::EmptySplit: return "EmptySplit";
    case Kind::DivergenceDetected: return "DivergenceDetected";
    case Kind::ModelGraphMismatch: return "ModelGraphMismatch";
    case Kind::BudgetZero: return "BudgetZero";
    case Kind::ConfigInvalid: return "ConfigInvalid";
    case Kind::FileNotFound: return "FileNotFound";
    case Kind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Kind::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

static const char kHexDigits[] = "0123456789abcdef";

std::string hex_encode(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

static int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<uint8_t> hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0)
    throw Error(Error::Kind::BadFormat, "hex string has odd length");
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_val(hex[2 * i]);
    const int lo = hex_val(hex[2 * i + 1]);
    if (hi < 0 || lo < 0)
      throw Error(Error::Kind::BadFormat,
                  "invalid hex digit in \"" + std::string(hex) + "\"");
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

static const char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::span<const uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8 | bytes[i + 2];
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
  }
  const size_t rem = bytes.size() - i;
  if (rem == 1) {
    const uint32_t v = bytes[i] << 16;
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    const uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8;
    out.push_back(kB64[v >> 18]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(std::string_view b64) {
  static int8_t table[256];
  static bool init = false;
  if (!init) {
    for (int i = 0; i < 256; ++i) table[i] = -1;
    for (int i = 0; i < 64; ++i) table[static_cast<uint8_t>(kB64[i])] = static_cast<int8_t>(i);
    init = true;
  }
  if (b64.size() % 4 != 0)
    throw Error(Error::Kind::BadFormat, "base64 length not a multiple of 4");
  std::vector<uint8_t> out;
  out.reserve(b64.size() / 4 * 3);
  for (size_t i = 0; i < b64.size(); i += 4) {
    int pad = 0;
    uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = b64[i + j];
      if (c == '=' && i + 4 == b64.size() && j >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int8_t d = table[static_cast<uint8_t>(c)];
      if (d < 0) throw Error(Error::Kind::BadFormat, "invalid base64 character");
      v = v << 6 | static_cast<uint32_t>(d);
    }
    out.push_back(static_cast<uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<uint8_t>(v));
  }
  return out;
}

std::vector<uint8_t> pack_bits(std::span<const uint8_t> bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  return out;
}

std::vector<uint8_t> unpack_bits(std::span<const uint8_t> bytes, size_t nbits) {
  if (bytes.size() * 8 < nbits)
    throw Error(Error::Kind::BadFormat, "bit buffer too short");
  std::vector<uint8_t> out(nbits);
  for (size_t i = 0; i < nbits; ++i)
    out[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return out;
}

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Error::Kind::FileNotFound, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_file(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(Error::Kind::FileNotFound, "cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Error::Kind::FileNotFound, "write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace netfuzz
