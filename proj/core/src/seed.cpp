#include "netfuzz/seed.hpp"

#include <sstream>

#include "netfuzz/error.hpp"
#include "netfuzz/util.hpp"

namespace netfuzz {

std::string seed_to_hex(const Seed& s) {
  return hex_encode(pack_bits(s.bits));
}

Seed seed_from_hex(std::string_view hex, uint32_t width, uint32_t T) {
  const size_t nbits = static_cast<size_t>(width) * T;
  const std::vector<uint8_t> bytes = hex_decode(hex);
  if (bytes.size() != (nbits + 7) / 8) {
    std::ostringstream msg;
    msg << "seed hex encodes " << bytes.size() << " bytes, expected "
        << (nbits + 7) / 8 << " for width " << width << " x " << T << " cycles";
    throw Error(Error::Kind::SeedWidthMismatch, msg.str());
  }
  for (size_t i = nbits; i < bytes.size() * 8; ++i)
    if ((bytes[i / 8] >> (i % 8)) & 1)
      throw Error(Error::Kind::BadFormat, "seed hex has nonzero padding bits");
  Seed s;
  s.width = width;
  s.T = T;
  s.bits = unpack_bits(bytes, nbits);
  return s;
}

}  // namespace netfuzz
