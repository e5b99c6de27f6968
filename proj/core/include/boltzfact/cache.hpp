#pragma once

#include "boltzfact/contraction.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace boltzfact {

inline constexpr std::uint32_t kCacheVersion = 1;

// Fixed-size header of an operator cache. All fields little-endian on disk.
struct CacheHeader {
    std::uint32_t version = kCacheVersion;
    std::uint32_t k_max = 0;
    std::uint32_t l_max = 0;
    double gamma = 0.0;
    GridSpec grid;
    std::uint64_t n_t = 0;
    std::uint64_t n_g = 0;
    RTensorFlags flags;
    std::uint64_t payload_bytes = 0;
    std::uint32_t crc32 = 0;
};

// Layout: "BFCT" | header | channels (3 x u32) | COO rows (4 x u32, f64) | R values (f64).
std::vector<unsigned char> serialize_operator(const FactorizedOperator& op);
FactorizedOperator deserialize_operator(const std::vector<unsigned char>& bytes);

// Throws IoError on filesystem failure and IntegrityError on bad magic, version,
// size or checksum.
void save_operator(const FactorizedOperator& op, const std::filesystem::path& path);
FactorizedOperator load_operator(const std::filesystem::path& path);

// Header only, after verifying the payload checksum.
CacheHeader read_cache_header(const std::filesystem::path& path);

}  // namespace boltzfact
