#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace uzvkit {

// One CSV block: a header row plus string cells. Numbers are formatted by the caller
// (shortest round-trip), missing values are empty cells.
struct ReportTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::size_t column(std::string_view name) const;  // throws std::out_of_range
    double number(std::size_t row, std::string_view col) const;
};

// Layout on disk:
//   # experiment=<id>
//   # table=<name>
//   <header>
//   <rows>
//   # table=<next>
//   ...
struct ExperimentReport {
    std::string id;
    std::vector<ReportTable> tables;
    bool converged = true;  // false if some iterative method hit its iteration cap

    ReportTable& table(std::string_view name);
    const ReportTable& table(std::string_view name) const;
    std::string to_csv() const;
    void write(const std::string& path) const;  // "-" or empty means stdout

    static ExperimentReport parse(std::string_view text);
};

std::string num(double x);
std::string num(std::size_t x);

}  // namespace uzvkit
