#pragma once

#include <zlib.h>

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/image.hpp"

namespace signbench {

// PNG (8-bit, non-interlaced; gray / gray+alpha / RGB / RGBA / palette) and
// binary PNM (P5/P6) codecs. Compression and CRC come from zlib; the container
// handling is local so decode errors surface as ImageDecodeError with the
// offending path instead of a library abort. Alpha channels are dropped on
// load; palette images expand to RGB.
namespace codec_detail {

inline std::uint32_t read_u32_be(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline void push_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint8_t paeth_predict(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

inline const std::uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace codec_detail

inline RawImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  using namespace codec_detail;
  auto fail = [&](const std::string& why) -> RawImage {
    raise(ErrorCode::ImageDecodeError, origin + ": " + why);
  };
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSignature, 8) != 0) {
    return fail("not a PNG stream");
  }

  std::size_t pos = 8;
  bool saw_ihdr = false, saw_iend = false;
  std::uint32_t width = 0, height = 0;
  int bit_depth = 0, color_type = 0, interlace = 0;
  std::vector<std::uint8_t> idat;
  std::vector<std::uint8_t> palette;  // 3 bytes per entry

  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = read_u32_be(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) return fail("truncated chunk");
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const std::uint8_t* data = &bytes[pos + 8];
    const std::uint32_t stored_crc = read_u32_be(&bytes[pos + 8 + len]);
    const std::uint32_t crc =
        ::crc32(::crc32(0L, &bytes[pos + 4], 4), len ? data : nullptr, len);
    if (crc != stored_crc) return fail("chunk CRC mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) return fail("bad IHDR length");
      width = read_u32_be(data);
      height = read_u32_be(data + 4);
      bit_depth = data[8];
      color_type = data[9];
      interlace = data[12];
      saw_ihdr = true;
    } else if (std::memcmp(type, "PLTE", 4) == 0) {
      if (len % 3 != 0) return fail("bad PLTE length");
      palette.assign(data, data + len);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
      break;
    }
    // ancillary chunks are skipped
    pos += 12 + len;
  }
  if (!saw_ihdr) return fail("missing IHDR");
  if (!saw_iend) return fail("missing IEND");
  if (width == 0 || height == 0) return fail("zero dimensions");
  if (width > (1u << 20) || height > (1u << 20)) return fail("unreasonable dimensions");
  if (bit_depth != 8) return fail("unsupported bit depth " + std::to_string(bit_depth));
  if (interlace != 0) return fail("interlaced PNG unsupported");

  int src_channels = 0;
  switch (color_type) {
    case 0: src_channels = 1; break;  // gray
    case 2: src_channels = 3; break;  // rgb
    case 3: src_channels = 1; break;  // palette index
    case 4: src_channels = 2; break;  // gray + alpha
    case 6: src_channels = 4; break;  // rgba
    default: return fail("unsupported color type " + std::to_string(color_type));
  }
  if (color_type == 3 && palette.empty()) return fail("palette image without PLTE");

  const std::size_t stride = static_cast<std::size_t>(width) * src_channels;
  const std::size_t raw_size = static_cast<std::size_t>(height) * (stride + 1);
  std::vector<std::uint8_t> raw(raw_size);
  uLongf dest_len = static_cast<uLongf>(raw_size);
  const int zrc = ::uncompress(raw.data(), &dest_len, idat.data(),
                               static_cast<uLong>(idat.size()));
  if (zrc != Z_OK || dest_len != raw_size) return fail("zlib inflate failed");

  // undo per-row filters in place
  const std::size_t bpp = static_cast<std::size_t>(src_channels);
  std::vector<std::uint8_t> prev_row(stride, 0);
  std::vector<std::uint8_t> row(stride);
  std::vector<std::uint8_t> unfiltered;
  unfiltered.reserve(static_cast<std::size_t>(height) * stride);
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t filter = raw[y * (stride + 1)];
    const std::uint8_t* src = &raw[y * (stride + 1) + 1];
    switch (filter) {
      case 0:
        std::memcpy(row.data(), src, stride);
        break;
      case 1:  // Sub
        for (std::size_t i = 0; i < stride; ++i) {
          const std::uint8_t left = i >= bpp ? row[i - bpp] : 0;
          row[i] = static_cast<std::uint8_t>(src[i] + left);
        }
        break;
      case 2:  // Up
        for (std::size_t i = 0; i < stride; ++i) {
          row[i] = static_cast<std::uint8_t>(src[i] + prev_row[i]);
        }
        break;
      case 3:  // Average
        for (std::size_t i = 0; i < stride; ++i) {
          const int left = i >= bpp ? row[i - bpp] : 0;
          row[i] = static_cast<std::uint8_t>(src[i] + ((left + prev_row[i]) >> 1));
        }
        break;
      case 4:  // Paeth
        for (std::size_t i = 0; i < stride; ++i) {
          const int left = i >= bpp ? row[i - bpp] : 0;
          const int up_left = i >= bpp ? prev_row[i - bpp] : 0;
          row[i] = static_cast<std::uint8_t>(
              src[i] + paeth_predict(left, prev_row[i], up_left));
        }
        break;
      default:
        return fail("bad filter type " + std::to_string(filter));
    }
    unfiltered.insert(unfiltered.end(), row.begin(), row.end());
    prev_row = row;
  }

  // map source channels to K in {1, 3}
  const std::size_t out_channels = (color_type == 0 || color_type == 4) ? 1 : 3;
  RawImage img(height, width, out_channels);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* s = &unfiltered[i * src_channels];
    std::uint8_t* d = &img.pixels[i * out_channels];
    switch (color_type) {
      case 0: d[0] = s[0]; break;
      case 4: d[0] = s[0]; break;
      case 2: d[0] = s[0]; d[1] = s[1]; d[2] = s[2]; break;
      case 6: d[0] = s[0]; d[1] = s[1]; d[2] = s[2]; break;
      case 3: {
        const std::size_t idx = static_cast<std::size_t>(s[0]) * 3;
        if (idx + 2 >= palette.size()) return fail("palette index out of range");
        d[0] = palette[idx];
        d[1] = palette[idx + 1];
        d[2] = palette[idx + 2];
        break;
      }
    }
  }
  return img;
}

inline std::vector<std::uint8_t> encode_png(const RawImage& img) {
  using namespace codec_detail;
  if (!img.valid()) raise(ErrorCode::ShapeError, "cannot encode invalid image");

  const std::size_t stride = img.width * img.channels;
  std::vector<std::uint8_t> raw;
  raw.reserve(img.height * (stride + 1));
  for (std::size_t y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter: None
    raw.insert(raw.end(), img.pixels.begin() + y * stride,
               img.pixels.begin() + (y + 1) * stride);
  }

  uLongf comp_cap = ::compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_cap);
  // fixed level so regeneration is byte-identical for a given zlib build
  if (::compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    raise(ErrorCode::IoError, "zlib deflate failed");
  }
  comp.resize(comp_cap);

  std::vector<std::uint8_t> out(kPngSignature, kPngSignature + 8);
  auto push_chunk = [&out](const char* type, const std::vector<std::uint8_t>& data) {
    push_u32_be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const std::uint32_t crc = ::crc32(0L, &out[type_pos], static_cast<uInt>(4 + data.size()));
    push_u32_be(out, crc);
  };

  std::vector<std::uint8_t> ihdr;
  push_u32_be(ihdr, static_cast<std::uint32_t>(img.width));
  push_u32_be(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);                                    // bit depth
  ihdr.push_back(img.channels == 1 ? 0 : 2);            // color type
  ihdr.push_back(0);                                    // compression
  ihdr.push_back(0);                                    // filter method
  ihdr.push_back(0);                                    // no interlace
  push_chunk("IHDR", ihdr);
  push_chunk("IDAT", comp);
  push_chunk("IEND", {});
  return out;
}

inline RawImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  auto fail = [&](const std::string& why) -> RawImage {
    raise(ErrorCode::ImageDecodeError, origin + ": " + why);
  };
  if (bytes.size() < 2) return fail("too short");
  const bool gray = bytes[1] == '5';
  if (bytes[0] != 'P' || (!gray && bytes[1] != '6')) return fail("not a binary PNM");

  std::size_t pos = 2;
  auto next_int = [&]() -> long {
    // skip whitespace and '#' comments
    while (pos < bytes.size()) {
      if (std::isspace(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
      any = true;
    }
    return any ? v : -1;
  };

  const long w = next_int(), h = next_int(), maxval = next_int();
  if (w <= 0 || h <= 0) return fail("bad dimensions");
  if (maxval != 255) return fail("only maxval 255 supported");
  ++pos;  // single whitespace after maxval
  const std::size_t k = gray ? 1 : 3;
  const std::size_t need = static_cast<std::size_t>(w) * h * k;
  if (pos + need > bytes.size()) return fail("truncated pixel data");
  RawImage img(static_cast<std::size_t>(h), static_cast<std::size_t>(w), k);
  std::memcpy(img.pixels.data(), &bytes[pos], need);
  return img;
}

inline std::vector<std::uint8_t> encode_pnm(const RawImage& img) {
  if (!img.valid()) raise(ErrorCode::ShapeError, "cannot encode invalid image");
  std::string header = (img.channels == 1 ? std::string("P5\n") : std::string("P6\n")) +
                       std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::IoError, "short write to " + path.string());
}

// Content sniffing: PNG signature first, then binary PNM.
inline RawImage decode_image(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  using namespace codec_detail;
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    return decode_png(bytes, origin);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, origin);
  }
  raise(ErrorCode::ImageDecodeError, origin + ": unrecognized image format");
}

inline RawImage load_image_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    raise(ErrorCode::IoError, "no such file: " + path.string());
  }
  return decode_image(read_file_bytes(path), path.string());
}

}  // namespace signbench
