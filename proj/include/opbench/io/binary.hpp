// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace opbench::io
{

// Little-endian raw arrays. Throw InputError on I/O failure or on a size that
// is not a whole number of elements.
void write_f64_le(const std::filesystem::path &path, std::span<const double> values);
std::vector<double> read_f64_le(const std::filesystem::path &path);
void write_f32_le(const std::filesystem::path &path, std::span<const float> values);
std::vector<float> read_f32_le(const std::filesystem::path &path);

void write_text(const std::filesystem::path &path, const std::string &text);
std::string read_text(const std::filesystem::path &path);

// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string &text);
std::string sha256_file(const std::filesystem::path &path);

}  // namespace opbench::io
