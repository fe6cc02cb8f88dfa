#pragma once

#include <cstddef>
#include <cstdint>

namespace dphc {

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320), as used by zip/png.
std::uint32_t crc32(const void* data, std::size_t len,
                    std::uint32_t seed = 0);

}  // namespace dphc
