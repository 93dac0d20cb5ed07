#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uzv/matrix.hpp"

namespace uzv::io {

enum class Format { Csv, RawF64, Pgm };

// "csv", "rawf64", "pgm"; throws ArgumentError otherwise.
Format parse_format(std::string_view name);
// Guess from the file extension (.csv, .pgm, anything else is RawF64).
Format format_from_extension(const std::filesystem::path& path);

// Csv    - comma separated rows, one per line.
// RawF64 - "UZV1", u64 LE rows, u64 LE cols, row-major f64 LE.
// Pgm    - binary P5, maxval <= 65535; pixel values are returned unscaled.
DenseMatrix load_matrix(const std::filesystem::path& path, Format format);
// Pgm output is clamped to [0, 255] and rounded.
void save_matrix(const DenseMatrix& m, const std::filesystem::path& path, Format format);

DenseMatrix parse_csv(std::string_view text);
DenseMatrix parse_rawf64(std::string_view bytes);
DenseMatrix parse_pgm(std::string_view bytes);
std::string encode_csv(const DenseMatrix& m);
std::string encode_rawf64(const DenseMatrix& m);
std::string encode_pgm(const DenseMatrix& m);

// Shortest representation that round-trips to the same double.
std::string format_double(double x);

}  // namespace uzv::io
