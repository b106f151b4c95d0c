#ifndef TWINFOCUS_IO_HPP
#define TWINFOCUS_IO_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twinfocus/rng.hpp"
#include "twinfocus/state.hpp"

// Binary artifact formats.
//   CMX1: magic "CMX1", u32-le rows, u32-le cols, then rows*cols (re, im)
//         f64-le pairs in row-major order.
//   FRS1: magic "FRS1", u32-le n_frames, u32-le h, u32-le w, then frames of
//         h*w bytes, each 0 or 1.
//   PGM:  binary P5, 16-bit, max-normalized; the physical scale goes into a
//         JSON sidecar written by the caller.

namespace twinfocus {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xff),
                                       static_cast<unsigned char>((v >> 8) & 0xff),
                                       static_cast<unsigned char>((v >> 16) & 0xff),
                                       static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b.data()), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char*>(b.data()), 4);
  if (!is) throw std::runtime_error("binary read: truncated stream");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

inline double get_f64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw std::runtime_error("binary read: truncated stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

inline void save_cmx(const CMatrix& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_cmx: cannot open " + path.string());
  os.write("CMX1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      detail::put_f64(os, m(r, c).real());
      detail::put_f64(os, m(r, c).imag());
    }
  if (!os) throw std::runtime_error("save_cmx: write failure on " + path.string());
}

inline CMatrix load_cmx(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_cmx: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CMX1", 4) != 0)
    throw std::runtime_error("load_cmx: bad magic in " + path.string());
  const std::uint32_t rows = detail::get_u32(is);
  const std::uint32_t cols = detail::get_u32(is);
  CMatrix m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c) {
      const double re = detail::get_f64(is);
      const double im = detail::get_f64(is);
      m(r, c) = Complex(re, im);
    }
  return m;
}

struct FrameStackData {
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> frames;  // n_frames * h * w, values in {0, 1}

  int n_frames() const { return h * w == 0 ? 0 : static_cast<int>(frames.size()) / (h * w); }
  std::uint8_t at(int p, int y, int x) const { return frames[std::size_t(p) * h * w + y * w + x]; }
  std::uint8_t& at(int p, int y, int x) { return frames[std::size_t(p) * h * w + y * w + x]; }
};

inline void save_frs(const FrameStackData& stack, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_frs: cannot open " + path.string());
  os.write("FRS1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(stack.n_frames()));
  detail::put_u32(os, static_cast<std::uint32_t>(stack.h));
  detail::put_u32(os, static_cast<std::uint32_t>(stack.w));
  os.write(reinterpret_cast<const char*>(stack.frames.data()),
           static_cast<std::streamsize>(stack.frames.size()));
  if (!os) throw std::runtime_error("save_frs: write failure on " + path.string());
}

inline FrameStackData load_frs(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_frs: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "FRS1", 4) != 0)
    throw std::runtime_error("load_frs: bad magic in " + path.string());
  const std::uint32_t n = detail::get_u32(is);
  const std::uint32_t h = detail::get_u32(is);
  const std::uint32_t w = detail::get_u32(is);
  FrameStackData stack;
  stack.h = static_cast<int>(h);
  stack.w = static_cast<int>(w);
  stack.frames.resize(std::size_t(n) * h * w);
  is.read(reinterpret_cast<char*>(stack.frames.data()),
          static_cast<std::streamsize>(stack.frames.size()));
  if (!is) throw std::runtime_error("load_frs: truncated stack in " + path.string());
  return stack;
}

// Max-normalized 16-bit PGM (Netpbm P5, big-endian samples). Returns the
// physical value mapped to 65535 so callers can record it in a sidecar.
inline double save_pgm16(const RMatrix& image, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_pgm16: cannot open " + path.string());
  const double max_value = image.maxCoeff();
  const double scale = max_value > 0.0 ? 65535.0 / max_value : 0.0;
  os << "P5\n" << image.cols() << " " << image.rows() << "\n65535\n";
  for (Eigen::Index y = 0; y < image.rows(); ++y)
    for (Eigen::Index x = 0; x < image.cols(); ++x) {
      const double clipped = std::max(image(y, x), 0.0);
      const auto v = static_cast<std::uint16_t>(std::lround(clipped * scale));
      const unsigned char bytes[2] = {static_cast<unsigned char>(v >> 8),
                                      static_cast<unsigned char>(v & 0xff)};
      os.write(reinterpret_cast<const char*>(bytes), 2);
    }
  if (!os) throw std::runtime_error("save_pgm16: write failure on " + path.string());
  return max_value;
}

inline void save_csv(const RMatrix& table, const std::vector<std::string>& header,
                     const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_csv: cannot open " + path.string());
  os << std::setprecision(17);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
  }
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) os << (c ? "," : "") << table(r, c);
    os << "\n";
  }
  if (!os) throw std::runtime_error("save_csv: write failure on " + path.string());
}

inline void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_text: cannot open " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write_text: write failure on " + path.string());
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("hash: cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[4096];
  while (is.read(buffer, sizeof(buffer)) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001b3ULL;
    }
    if (!is) break;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace twinfocus

#endif  // TWINFOCUS_IO_HPP
