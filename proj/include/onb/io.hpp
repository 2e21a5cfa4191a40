#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace onb {

/// Serializes doubles as little-endian IEEE-754 64-bit, independent of host
/// byte order.
std::string doubles_to_le_bytes(const double* data, std::size_t n);
std::vector<double> doubles_from_le_bytes(const std::string& bytes);

std::string sha256_hex(const void* data, std::size_t n);
std::string sha256_hex(const std::string& bytes);

/// Whole-file write via temp file + rename in the same directory.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& bytes);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace onb
