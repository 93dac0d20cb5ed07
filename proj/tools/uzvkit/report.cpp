#include "report.hpp"

#include <fstream>
#include <iostream>
#include <stdexcept>

#include "uzv/error.hpp"
#include "uzv/io.hpp"

namespace uzvkit {

std::string num(double x) { return uzv::io::format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }

void ReportTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw std::logic_error("report table '" + name + "': row has " + std::to_string(row.size()) +
                               " cells, header has " + std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::size_t ReportTable::column(std::string_view col) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == col) return i;
    throw std::out_of_range("report table '" + name + "' has no column '" + std::string(col) + "'");
}

double ReportTable::number(std::size_t row, std::string_view col) const {
    const std::string& cell = rows.at(row).at(column(col));
    if (cell.empty()) throw std::out_of_range("empty cell in column '" + std::string(col) + "'");
    return std::stod(cell);
}

ReportTable& ExperimentReport::table(std::string_view name) {
    for (auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("report has no table '" + std::string(name) + "'");
}

const ReportTable& ExperimentReport::table(std::string_view name) const {
    return const_cast<ExperimentReport*>(this)->table(name);
}

std::string ExperimentReport::to_csv() const {
    std::string out = "# experiment=" + id + "\n";
    for (const auto& t : tables) {
        out += "# table=" + t.name + "\n";
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(t.header);
        for (const auto& r : t.rows) line(r);
    }
    return out;
}

void ExperimentReport::write(const std::string& path) const {
    const std::string text = to_csv();
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write to " + path + " failed");
}

namespace {

std::vector<std::string> split_cells(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

ExperimentReport ExperimentReport::parse(std::string_view text) {
    ExperimentReport rep;
    ReportTable* cur = nullptr;
    bool want_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        const std::size_t offset = pos;
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.starts_with("# experiment=")) {
            rep.id = std::string(line.substr(13));
        } else if (line.starts_with("# table=")) {
            rep.tables.push_back({std::string(line.substr(8)), {}, {}});
            cur = &rep.tables.back();
            want_header = true;
        } else if (line.front() == '#') {
            continue;
        } else if (!cur) {
            throw uzv::DataError("report: data line before any '# table=' marker", offset);
        } else if (want_header) {
            cur->header = split_cells(line);
            want_header = false;
        } else {
            auto cells = split_cells(line);
            if (cells.size() != cur->header.size())
                throw uzv::DataError("report: row width " + std::to_string(cells.size()) + " does not match header width " +
                                         std::to_string(cur->header.size()),
                                     offset);
            cur->rows.push_back(std::move(cells));
        }
    }
    if (rep.id.empty()) throw uzv::DataError("report: missing '# experiment=' line", 0);
    return rep;
}

}  // namespace uzvkit
