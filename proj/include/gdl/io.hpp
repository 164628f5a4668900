#pragma once

// File formats: dense matrices as plain CSV (17 significant digits, exact
// round trip) and gray images as PGM, binary P5 or plain P2, maxval 255.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "gdl/errors.hpp"
#include "gdl/image.hpp"
#include "gdl/matrix.hpp"

namespace gdl {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

}  // namespace detail

// One matrix row per line, fields comma-separated, written with 17
// significant digits so a store/load round trip is bit-exact.
inline void store_matrix_csv(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << detail::format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

inline DenseMatrix load_matrix_csv(const std::string& path) {
  const std::string text = detail::read_file(path);

  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::size_t end = eol;
    if (end > pos && text[end - 1] == '\r') --end;  // tolerate CRLF
    ++line_no;
    if (pos == end && eol == text.size()) break;  // trailing empty line

    std::size_t field_no = 0;
    std::size_t fpos = pos;
    while (true) {
      std::size_t comma = text.find(',', fpos);
      const std::size_t fend = (comma == std::string::npos || comma >= end)
                                   ? end
                                   : comma;
      ++field_no;
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(text.data() + fpos, text.data() + fend, v);
      if (ec != std::errc{} || ptr != text.data() + fend)
        throw ParseError(path + ":" + std::to_string(line_no) + ": field " +
                         std::to_string(field_no) + " is not a number: '" +
                         text.substr(fpos, fend - fpos) + "'");
      values.push_back(v);
      if (fend == end) break;
      fpos = fend + 1;
    }
    if (rows == 0) {
      cols = field_no;
    } else if (field_no != cols) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                       std::to_string(field_no) + " fields, expected " +
                       std::to_string(cols));
    }
    ++rows;
    pos = eol + 1;
  }
  if (rows == 0) throw ParseError(path + ": no data rows");
  return DenseMatrix::from_values(rows, cols, std::move(values));
}

namespace detail {

// Next integer token in a PNM header/body, skipping whitespace and
// '#'-to-end-of-line comments.
inline long pnm_next_int(const std::string& text, std::size_t& pos,
                         const std::string& path) {
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' ||
               c == '\v' || c == '\f') {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= text.size()) throw ParseError(path + ": truncated header");
  long v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + text.size(), v);
  if (ec != std::errc{} || ptr == text.data() + pos)
    throw ParseError(path + ": expected integer at byte " +
                     std::to_string(pos));
  pos = static_cast<std::size_t>(ptr - text.data());
  return v;
}

}  // namespace detail

// Reads binary "P5" or plain "P2", maxval 255 only.
inline GrayImage load_pgm(const std::string& path) {
  const std::string text = detail::read_file(path);
  if (text.size() < 2 || text[0] != 'P' ||
      (text[1] != '5' && text[1] != '2'))
    throw UnsupportedFormat(path + ": not a P5/P2 PGM file");
  const bool binary = text[1] == '5';
  std::size_t pos = 2;
  const long width = detail::pnm_next_int(text, pos, path);
  const long height = detail::pnm_next_int(text, pos, path);
  const long maxval = detail::pnm_next_int(text, pos, path);
  if (width <= 0 || height <= 0)
    throw ParseError(path + ": non-positive dimensions");
  if (maxval != 255)
    throw UnsupportedFormat(path + ": maxval " + std::to_string(maxval) +
                            ", only 255 supported");

  GrayImage img;
  img.height = static_cast<std::size_t>(height);
  img.width = static_cast<std::size_t>(width);
  const std::size_t total = img.height * img.width;
  img.pixels.resize(total);

  if (binary) {
    ++pos;  // exactly one whitespace byte separates maxval from the raster
    if (pos + total > text.size())
      throw ParseError(path + ": raster truncated");
    for (std::size_t i = 0; i < total; ++i)
      img.pixels[i] = static_cast<double>(static_cast<unsigned char>(text[pos + i]));
  } else {
    for (std::size_t i = 0; i < total; ++i) {
      const long v = detail::pnm_next_int(text, pos, path);
      if (v < 0 || v > 255)
        throw ParseError(path + ": pixel value " + std::to_string(v) +
                         " out of range");
      img.pixels[i] = static_cast<double>(v);
    }
  }
  return img;
}

// Writes binary "P5", maxval 255. Pixels are rounded half-up; with
// clip_and_round they are first clamped to [0, 255], without it any value
// outside [0, 255] is an error.
inline void store_pgm(const GrayImage& img, const std::string& path,
                      bool clip_and_round = false) {
  if (img.height == 0 || img.width == 0)
    throw InvalidDims("store_pgm: empty image");
  std::string raster(img.height * img.width, '\0');
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v = img.pixels[i];
    if (clip_and_round) {
      v = std::min(255.0, std::max(0.0, v));
    } else if (v < 0.0 || v > 255.0) {
      throw OutOfRange("store_pgm: pixel " + std::to_string(i) + " = " +
                       std::to_string(v) + " outside [0, 255]");
    }
    raster[i] = static_cast<char>(
        static_cast<unsigned char>(std::min(255.0, std::floor(v + 0.5))));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace gdl
