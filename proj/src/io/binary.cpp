// SPDX-License-Identifier: Apache-2.0

#include "opbench/io/binary.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include "opbench/errors.hpp"

namespace opbench::io
{

namespace
{

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T, class U>
void write_le(const std::filesystem::path &path, std::span<const T> values)
{
  std::vector<U> words(values.size());
  std::memcpy(words.data(), values.data(), values.size_bytes());
  if constexpr (std::endian::native == std::endian::big)
  {
    for (auto &w : words)
    {
      U r = 0;
      for (std::size_t i = 0; i < sizeof(U); ++i)
      {
        r = (r << 8) | ((w >> (8 * i)) & 0xff);
      }
      w = r;
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char *>(words.data()), static_cast<std::streamsize>(values.size_bytes()));
  if (!out)
  {
    throw InputError("failed to write " + path.string());
  }
}

template <class T, class U>
std::vector<T> read_le(const std::filesystem::path &path)
{
  const std::string bytes = read_text(path);
  if (bytes.size() % sizeof(T) != 0)
  {
    throw InputError(path.string() + ": size " + std::to_string(bytes.size()) + " is not a multiple of " +
                     std::to_string(sizeof(T)));
  }
  std::vector<U> words(bytes.size() / sizeof(T));
  std::memcpy(words.data(), bytes.data(), bytes.size());
  if constexpr (std::endian::native == std::endian::big)
  {
    for (auto &w : words)
    {
      U r = 0;
      for (std::size_t i = 0; i < sizeof(U); ++i)
      {
        r = (r << 8) | ((w >> (8 * i)) & 0xff);
      }
      w = r;
    }
  }
  std::vector<T> out(words.size());
  std::memcpy(out.data(), words.data(), bytes.size());
  return out;
}

}  // namespace

void write_f64_le(const std::filesystem::path &path, std::span<const double> values)
{
  write_le<double, std::uint64_t>(path, values);
}

std::vector<double> read_f64_le(const std::filesystem::path &path)
{
  return read_le<double, std::uint64_t>(path);
}

void write_f32_le(const std::filesystem::path &path, std::span<const float> values)
{
  write_le<float, std::uint32_t>(path, values);
}

std::vector<float> read_f32_le(const std::filesystem::path &path)
{
  return read_le<float, std::uint32_t>(path);
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
  {
    throw InputError("failed to write " + path.string());
  }
}

std::string read_text(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw InputError("cannot open " + path.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string sha256_hex(std::span<const unsigned char> bytes)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
  {
    throw Error("io", "SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i)
  {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_hex(const std::string &text)
{
  return sha256_hex(std::span(reinterpret_cast<const unsigned char *>(text.data()), text.size()));
}

std::string sha256_file(const std::filesystem::path &path)
{
  return sha256_hex(read_text(path));
}

}  // namespace opbench::io
