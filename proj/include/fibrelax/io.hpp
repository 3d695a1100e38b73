#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fibrelax/state.hpp"

namespace fibrelax {

// One CSV cell; doubles are printed with 17 significant digits so a re-parse
// reproduces the value exactly.
using CsvCell = std::variant<double, long long, unsigned long long, std::string, bool>;
using CsvRow = std::vector<CsvCell>;

std::string format_cell(const CsvCell& c);

// RFC-4180 CSV with '\n' line endings; the header row is always written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows);

// Minimal reader for the files this tool writes (numeric payloads, no
// quoting); returns header + rows of strings.
struct CsvContent {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvContent read_csv(const std::string& path);

// Full-state snapshot, little-endian, magic "FIBS1":
//   magic[5] | u64 N | f64 box_x | f64 box_y | f64 time
//   N x (f64 x, f64 y, f64 theta)
//   u64 K | K x (u64 i, u64 j, f64 ell_i, f64 ell_j)
void write_snapshot(const std::string& path, const FiberState& s);
FiberState read_snapshot(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace fibrelax
