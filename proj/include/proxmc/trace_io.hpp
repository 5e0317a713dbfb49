#pragma once

// Binary trace files: a 16-byte header (magic "PXMC", u32 version, u32 T,
// u32 sample count, all little-endian) followed by count rows of 2T
// little-endian doubles, R then O.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace proxmc {

inline constexpr std::uint32_t kTraceVersion = 1;

struct TraceFile {
  std::uint32_t T = 0;
  std::vector<double> samples;  // count * 2T

  std::size_t count() const { return T == 0 ? 0 : samples.size() / (2 * static_cast<std::size_t>(T)); }
};

void write_trace(std::ostream& out, std::uint32_t T, const std::vector<double>& samples);
void write_trace(const std::filesystem::path& path, std::uint32_t T, const std::vector<double>& samples);
/// Throws ParseError on a bad magic, version or truncated payload.
TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

}  // namespace proxmc
