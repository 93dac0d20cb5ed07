#include "uzv/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "uzv/error.hpp"

namespace uzv::io {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string(), 0);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to " + path.string() + " failed");
}

std::uint64_t read_u64_le(std::string_view b, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[off + static_cast<std::size_t>(i)]);
    return v;
}

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "rawf64") return Format::RawF64;
    if (name == "pgm") return Format::Pgm;
    throw ArgumentError("unknown matrix format '" + std::string(name) + "' (expected csv, rawf64 or pgm)");
}

Format format_from_extension(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return Format::Csv;
    if (ext == ".pgm") return Format::Pgm;
    return Format::RawF64;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

// ---------------------------------------------------------------------------

DenseMatrix parse_csv(std::string_view text) {
    std::vector<double> values;
    std::size_t rows = 0, cols = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        const std::size_t line_start = pos;
        pos = eol + 1;
        if (std::all_of(line.begin(), line.end(), is_space)) continue;

        std::size_t count = 0;
        std::size_t fpos = 0;
        while (true) {
            std::size_t comma = line.find(',', fpos);
            if (comma == std::string_view::npos) comma = line.size();
            std::string_view field = line.substr(fpos, comma - fpos);
            std::size_t lead = 0;
            while (lead < field.size() && is_space(field[lead])) ++lead;
            std::size_t trail = field.size();
            while (trail > lead && is_space(field[trail - 1])) --trail;
            const std::size_t offset = line_start + fpos + lead;
            double v = 0.0;
            const char* first = field.data() + lead;
            const char* last = field.data() + trail;
            if (first != last && *first == '+') ++first;
            const auto res = std::from_chars(first, last, v);
            if (lead == trail || res.ec != std::errc() || res.ptr != last)
                throw DataError("csv: malformed number '" + std::string(field) + "'", offset);
            if (!std::isfinite(v)) throw DataError("csv: non-finite value", offset);
            values.push_back(v);
            ++count;
            if (comma == line.size()) break;
            fpos = comma + 1;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw DataError("csv: row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                                " fields, expected " + std::to_string(cols),
                            line_start);
        }
        ++rows;
    }
    if (rows == 0) throw DataError("csv: no data", 0);
    return {rows, cols, std::move(values)};
}

std::string encode_csv(const DenseMatrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out.push_back(',');
            out += format_double(m(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------

DenseMatrix parse_rawf64(std::string_view b) {
    if (b.size() < 4 || b.substr(0, 4) != "UZV1") throw DataError("rawf64: missing UZV1 magic", 0);
    if (b.size() < 20) throw DataError("rawf64: truncated header", b.size());
    const std::uint64_t rows = read_u64_le(b, 4);
    const std::uint64_t cols = read_u64_le(b, 12);
    if (rows == 0 || cols == 0 || rows > (std::uint64_t{1} << 32) || cols > (std::uint64_t{1} << 32) ||
        rows * cols > (std::uint64_t{1} << 40))
        throw DataError("rawf64: implausible dimensions " + std::to_string(rows) + "x" + std::to_string(cols), 4);
    const std::uint64_t need = 20 + rows * cols * 8;
    if (b.size() < need) throw DataError("rawf64: short file, payload ends early", b.size());
    if (b.size() > need) throw DataError("rawf64: trailing bytes after payload", need);
    std::vector<double> values(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t off = 20 + i * 8;
        values[i] = std::bit_cast<double>(read_u64_le(b, off));
        if (!std::isfinite(values[i])) throw DataError("rawf64: non-finite value", off);
    }
    return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(values)};
}

std::string encode_rawf64(const DenseMatrix& m) {
    std::string out = "UZV1";
    out.reserve(20 + m.size() * 8);
    append_u64_le(out, m.rows());
    append_u64_le(out, m.cols());
    for (double x : m.data()) append_u64_le(out, std::bit_cast<std::uint64_t>(x));
    return out;
}

// ---------------------------------------------------------------------------

DenseMatrix parse_pgm(std::string_view b) {
    if (b.size() < 2 || b[0] != 'P' || b[1] != '5') throw DataError("pgm: expected binary P5 magic", 0);
    std::size_t pos = 2;
    auto next_token = [&]() -> std::uint64_t {
        // whitespace and '#' comments may separate header fields
        while (pos < b.size()) {
            if (is_space(b[pos])) {
                ++pos;
            } else if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        std::uint64_t v = 0;
        while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
            v = v * 10 + static_cast<std::uint64_t>(b[pos] - '0');
            if (v > (std::uint64_t{1} << 32)) throw DataError("pgm: header value too large", start);
            ++pos;
        }
        if (pos == start) throw DataError("pgm: malformed header", start);
        return v;
    };
    const std::uint64_t width = next_token();
    const std::uint64_t height = next_token();
    const std::size_t maxval_off = pos;
    const std::uint64_t maxval = next_token();
    if (width == 0 || height == 0) throw DataError("pgm: zero dimension", maxval_off);
    if (maxval == 0 || maxval > 65535) throw DataError("pgm: maxval must be in [1, 65535]", maxval_off);
    if (pos >= b.size() || !is_space(b[pos])) throw DataError("pgm: missing separator before raster", pos);
    ++pos;
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    const std::size_t need = pos + width * height * bpp;
    if (b.size() < need) throw DataError("pgm: raster truncated", b.size());
    DenseMatrix m(height, width);
    auto d = m.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t off = pos + i * bpp;
        std::uint32_t v = static_cast<unsigned char>(b[off]);
        if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(b[off + 1]);
        if (v > maxval) throw DataError("pgm: pixel exceeds maxval", off);
        d[i] = static_cast<double>(v);
    }
    return m;
}

std::string encode_pgm(const DenseMatrix& m) {
    std::string out = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
    out.reserve(out.size() + m.size());
    for (double x : m.data()) {
        const double c = std::isnan(x) ? 0.0 : std::clamp(std::round(x), 0.0, 255.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(c)));
    }
    return out;
}

// ---------------------------------------------------------------------------

DenseMatrix load_matrix(const std::filesystem::path& path, Format format) {
    const std::string bytes = read_file(path);
    switch (format) {
        case Format::Csv: return parse_csv(bytes);
        case Format::RawF64: return parse_rawf64(bytes);
        case Format::Pgm: return parse_pgm(bytes);
    }
    throw ArgumentError("load_matrix: unknown format");
}

void save_matrix(const DenseMatrix& m, const std::filesystem::path& path, Format format) {
    switch (format) {
        case Format::Csv: return write_file(path, encode_csv(m));
        case Format::RawF64: return write_file(path, encode_rawf64(m));
        case Format::Pgm: return write_file(path, encode_pgm(m));
    }
}

}  // namespace uzv::io
