#include "proxmc/trace_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "proxmc/error.hpp"

namespace proxmc {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'X', 'M', 'C'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_f64(char* dst, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k, bits >>= 8) dst[k] = static_cast<char>(bits & 0xFF);
}

double get_f64(const unsigned char* src) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = bits << 8 | src[k];
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_trace(std::ostream& out, std::uint32_t T, const std::vector<double>& samples) {
  if (T == 0 || samples.size() % (2 * static_cast<std::size_t>(T)) != 0)
    throw ConfigError("trace length is not a multiple of 2T");
  const std::size_t count = samples.size() / (2 * static_cast<std::size_t>(T));
  if (count > 0xFFFFFFFFu) throw ConfigError("too many samples for the trace format");
  out.write(kMagic.data(), 4);
  put_u32(out, kTraceVersion);
  put_u32(out, T);
  put_u32(out, static_cast<std::uint32_t>(count));
  std::vector<char> buf(samples.size() * 8);
  for (std::size_t k = 0; k < samples.size(); ++k) put_f64(buf.data() + 8 * k, samples[k]);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("failed to write trace");
}

void write_trace(const std::filesystem::path& path, std::uint32_t T, const std::vector<double>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  write_trace(out, T, samples);
}

TraceFile read_trace(std::istream& in) {
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), 16)) throw ParseError("trace file is shorter than its header");
  if (std::memcmp(header, kMagic.data(), 4) != 0) throw ParseError("not a trace file (bad magic)");
  const std::uint32_t version = get_u32(header + 4);
  if (version != kTraceVersion) throw ParseError("unsupported trace version " + std::to_string(version));
  TraceFile out;
  out.T = get_u32(header + 8);
  const std::uint32_t count = get_u32(header + 12);
  if (out.T == 0 && count != 0) throw ParseError("trace header has T = 0");
  const std::size_t n = static_cast<std::size_t>(count) * 2 * out.T;
  std::vector<unsigned char> buf(n * 8);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
    throw ParseError("trace payload is truncated");
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after trace payload");
  out.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.samples[k] = get_f64(buf.data() + 8 * k);
  return out;
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_trace(in);
}

}  // namespace proxmc
