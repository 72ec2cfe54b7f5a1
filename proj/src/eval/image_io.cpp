// Copyright 2026 The bgpatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bgpatch/eval/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgpatch {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

std::vector<std::uint8_t> to_interleaved_u8(const ImageBuffer& img) {
  const ImageDims d = img.dims();
  std::vector<std::uint8_t> out(d.size());
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      for (int c = 0; c < ImageDims::channels; ++c) {
        out[(static_cast<std::size_t>(y) * d.width + x) * 3 + c] =
            static_cast<std::uint8_t>(std::lround(std::clamp(img.at(c, y, x), 0.0, 255.0)));
      }
    }
  }
  return out;
}

ImageBuffer from_interleaved(ImageDims d, const auto& data) {
  std::vector<double> planar(d.size());
  for (int c = 0; c < ImageDims::channels; ++c) {
    for (int y = 0; y < d.height; ++y) {
      for (int x = 0; x < d.width; ++x) {
        planar[(static_cast<std::size_t>(c) * d.height + y) * d.width + x] =
            static_cast<double>(data[(static_cast<std::size_t>(y) * d.width + x) * 3 + c]);
      }
    }
  }
  return ImageBuffer(d, std::move(planar));
}

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) fail(path, image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(path, msg);
  }
  const ImageDims d{static_cast<int>(image.height), static_cast<int>(image.width)};
  return from_interleaved(d, buffer);
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  const std::vector<std::uint8_t> data = to_interleaved_u8(img);
  if (!png_image_write_to_file(&image, path.c_str(), 0, data.data(), 0, nullptr)) fail(path, image.message);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  return {};
}

ImageBuffer read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  if (header_token(in) != "P6") fail(path, "not a binary PPM");
  int w = 0;
  int h = 0;
  int maxval = 0;
  try {
    w = std::stoi(header_token(in));
    h = std::stoi(header_token(in));
    maxval = std::stoi(header_token(in));
  } catch (const std::exception&) {
    fail(path, "malformed PPM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255) fail(path, "unsupported PPM geometry or depth");
  in.get();
  const ImageDims d{h, w};
  std::vector<std::uint8_t> data(d.size());
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    fail(path, "truncated PPM data");
  }
  return from_interleaved(d, data);
}

void write_ppm(const std::filesystem::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  const std::vector<std::uint8_t> data = to_interleaved_u8(img);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(path, "write failed");
}

// PFM rows run bottom to top; a negative scale marks little-endian samples.
ImageBuffer read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  if (header_token(in) != "PF") fail(path, "not a colour PFM");
  int w = 0;
  int h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(header_token(in));
    h = std::stoi(header_token(in));
    scale = std::stod(header_token(in));
  } catch (const std::exception&) {
    fail(path, "malformed PFM header");
  }
  if (w <= 0 || h <= 0 || scale == 0.0) fail(path, "invalid PFM header");
  in.get();
  const bool little = scale < 0;
  const ImageDims d{h, w};
  std::vector<std::uint32_t> raw(d.size());
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4))) {
    fail(path, "truncated PFM data");
  }
  const bool swap = little != (std::endian::native == std::endian::little);
  std::vector<float> top_down(d.size());
  for (int y = 0; y < h; ++y) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * 3; ++i) {
      std::uint32_t v = raw[static_cast<std::size_t>(h - 1 - y) * w * 3 + i];
      if (swap) v = __builtin_bswap32(v);
      top_down[static_cast<std::size_t>(y) * w * 3 + i] = std::bit_cast<float>(v);
    }
  }
  for (float v : top_down) {
    if (!(v >= 0.0f && v <= 255.0f)) fail(path, "PFM sample outside [0, 255]");
  }
  return from_interleaved(d, top_down);
}

void write_pfm(const std::filesystem::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  const bool little = std::endian::native == std::endian::little;
  out << "PF\n" << img.width() << ' ' << img.height() << '\n' << (little ? "-1.0" : "1.0") << '\n';
  const ImageDims d = img.dims();
  std::vector<float> row(static_cast<std::size_t>(d.width) * 3);
  for (int y = d.height - 1; y >= 0; --y) {
    for (int x = 0; x < d.width; ++x) {
      for (int c = 0; c < 3; ++c) row[static_cast<std::size_t>(x) * 3 + c] = static_cast<float>(img.at(c, y, x));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) fail(path, "write failed");
}

}  // namespace

ImageBuffer read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  if (ext == ".pfm") return read_pfm(path);
  fail(path, "unsupported image extension '" + ext + "'");
}

void write_image(const std::filesystem::path& path, const ImageBuffer& img) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(path, img);
  if (ext == ".ppm") return write_ppm(path, img);
  if (ext == ".pfm") return write_pfm(path, img);
  fail(path, "unsupported image extension '" + ext + "'");
}

}  // namespace bgpatch
