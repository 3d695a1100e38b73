#include "fibrelax/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fibrelax/errors.hpp"

namespace fibrelax {

std::string format_cell(const CsvCell& c) {
    char buf[40];
    if (std::holds_alternative<double>(c)) {
        std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
        return buf;
    }
    if (std::holds_alternative<long long>(c)) {
        std::snprintf(buf, sizeof buf, "%lld", std::get<long long>(c));
        return buf;
    }
    if (std::holds_alternative<unsigned long long>(c)) {
        std::snprintf(buf, sizeof buf, "%llu", std::get<unsigned long long>(c));
        return buf;
    }
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "1" : "0";
    return std::get<std::string>(c);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const CsvRow& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_cell(row[i]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

CsvContent read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    CsvContent c;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            c.header = std::move(cells);
            first = false;
        } else {
            c.rows.push_back(std::move(cells));
        }
    }
    return c;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    put_u64(out, u);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t u = get_u64(in);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

} // namespace

void write_snapshot(const std::string& path, const FiberState& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write("FIBS1", 5);
    put_u64(out, s.size());
    put_f64(out, s.box_x);
    put_f64(out, s.box_y);
    put_f64(out, s.time);
    for (std::size_t i = 0; i < s.size(); ++i) {
        put_f64(out, s.x[i]);
        put_f64(out, s.y[i]);
        put_f64(out, s.theta[i]);
    }
    put_u64(out, s.links.size());
    for (const Link& k : s.links) {
        put_u64(out, k.i);
        put_u64(out, k.j);
        put_f64(out, k.ell_i);
        put_f64(out, k.ell_j);
    }
    if (!out) throw IoError("write failed: " + path);
}

FiberState read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "FIBS1", 5) != 0)
        throw IoError("not a FIBS1 snapshot: " + path);
    FiberState s;
    const std::uint64_t n = get_u64(in);
    s.box_x = get_f64(in);
    s.box_y = get_f64(in);
    s.time = get_f64(in);
    s.x.resize(n);
    s.y.resize(n);
    s.theta.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        s.x[i] = get_f64(in);
        s.y[i] = get_f64(in);
        s.theta[i] = get_f64(in);
    }
    const std::uint64_t k = get_u64(in);
    s.links.resize(k);
    for (std::uint64_t q = 0; q < k; ++q) {
        s.links[q].i = static_cast<std::uint32_t>(get_u64(in));
        s.links[q].j = static_cast<std::uint32_t>(get_u64(in));
        s.links[q].ell_i = get_f64(in);
        s.links[q].ell_j = get_f64(in);
    }
    if (!in) throw IoError("truncated snapshot: " + path);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

} // namespace fibrelax
