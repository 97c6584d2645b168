#pragma once

// Minimal 8-bit grayscale PNG reader/writer over zlib. Writes filter-0
// scanlines; reads any of the five standard filters so externally produced
// grayscale images round-trip too.

#include <zlib.h>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dropeval::png {

class PngError : public std::runtime_error {
 public:
  explicit PngError(const std::string& what) : std::runtime_error("png: " + what) {}
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::uint8_t* data, std::size_t len) {
  put_u32(out, static_cast<std::uint32_t>(len));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  if (len > 0) out.insert(out.end(), data, data + len);
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + len));
  put_u32(out, crc);
}

inline int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace detail

inline constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

/// Encodes an 8-bit grayscale image into PNG bytes.
inline std::vector<std::uint8_t> encode_gray8(const GrayImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw PngError("image dimensions do not match pixel buffer");

  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter type 0 (None)
    const auto* row = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
    raw.insert(raw.end(), row, row + img.width);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    throw PngError("deflate failed");
  compressed.resize(bound);

  std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());
  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(img.width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(img.width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(img.width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(img.width);
  ihdr[4] = static_cast<std::uint8_t>(img.height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(img.height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(img.height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(img.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // color type: grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter method
  ihdr[12] = 0;  // no interlace
  detail::append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
  detail::append_chunk(out, "IDAT", compressed.data(), compressed.size());
  detail::append_chunk(out, "IEND", nullptr, 0);
  return out;
}

/// Decodes an 8-bit grayscale PNG.
inline GrayImage decode_gray8(const std::uint8_t* data, std::size_t size) {
  if (size < 8 || std::memcmp(data, kSignature.data(), 8) != 0)
    throw PngError("bad signature");

  GrayImage img;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  bool saw_ihdr = false, saw_iend = false;
  while (pos + 8 <= size && !saw_iend) {
    const std::uint32_t len = detail::get_u32(data + pos);
    if (pos + 12 + len > size) throw PngError("truncated chunk");
    const char* type = reinterpret_cast<const char*>(data + pos + 4);
    const std::uint8_t* body = data + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw PngError("bad IHDR");
      img.width = static_cast<int>(detail::get_u32(body));
      img.height = static_cast<int>(detail::get_u32(body + 4));
      if (body[8] != 8 || body[9] != 0) throw PngError("only 8-bit grayscale supported");
      if (body[12] != 0) throw PngError("interlaced images not supported");
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), body, body + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || img.width <= 0 || img.height <= 0) throw PngError("missing IHDR");

  const std::size_t stride = static_cast<std::size_t>(img.width) + 1;
  std::vector<std::uint8_t> raw(stride * img.height);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size())
    throw PngError("inflate failed");

  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<std::uint8_t> prev(img.width, 0);
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t filter = raw[static_cast<std::size_t>(y) * stride];
    const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * stride + 1;
    std::uint8_t* dst = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < img.width; ++x) {
      const int a = x > 0 ? dst[x - 1] : 0;      // left
      const int b = prev[x];                     // up
      const int c = x > 0 ? prev[x - 1] : 0;     // up-left
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += detail::paeth(a, b, c); break;
        default: throw PngError("unknown filter type");
      }
      dst[x] = static_cast<std::uint8_t>(v & 0xFF);
    }
    std::memcpy(prev.data(), dst, img.width);
  }
  return img;
}

inline GrayImage decode_gray8(const std::vector<std::uint8_t>& bytes) {
  return decode_gray8(bytes.data(), bytes.size());
}

inline void write_gray8(const std::filesystem::path& path, const GrayImage& img) {
  const std::vector<std::uint8_t> bytes = encode_gray8(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PngError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PngError("write failed: " + path.string());
}

inline GrayImage read_gray8(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PngError("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_gray8(bytes.data(), bytes.size());
}

}  // namespace dropeval::png
