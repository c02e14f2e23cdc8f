#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace gibbsium {

// One CSV cell: text, integer, or double. Doubles print with %.17g (exact
// round trip); +/-infinity prints as the token "inf"/"-inf".
using CsvCell = std::variant<std::string, long long, double>;

inline std::string csv_format(const CsvCell& c) {
    if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
    if (std::holds_alternative<double>(c)) {
        double v = std::get<double>(c);
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
    // RFC 4180 quoting for text fields
    const std::string& s = std::get<std::string>(c);
    bool needs = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;

    void add_row(std::vector<CsvCell> r) { rows.push_back(std::move(r)); }

    // Serialized with a leading metadata comment line; CRLF-free, UTF-8.
    std::string serialize(uint64_t cfg_hash, uint64_t seed) const {
        std::ostringstream out;
        char meta[96];
        std::snprintf(meta, sizeof(meta), "# config_hash=%016llx seed=%llu\n",
                      (unsigned long long)cfg_hash, (unsigned long long)seed);
        out << meta;
        for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_format(header[i]);
        out << "\n";
        for (const auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_format(r[i]);
            out << "\n";
        }
        return out.str();
    }

    void write(const std::string& path, uint64_t cfg_hash, uint64_t seed) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::ios_base::failure("cannot open output file: " + path);
        std::string s = serialize(cfg_hash, seed);
        f.write(s.data(), (std::streamsize)s.size());
        if (!f) throw std::ios_base::failure("write failed: " + path);
    }
};

}  // namespace gibbsium
