#pragma once
// Small CSV writer used by the report stage.
//
// All floating point columns go through format_fixed() so the output is
// byte-stable across runs and platforms.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symatlas {

// Fixed-point decimal string, default six places.
inline std::string format_fixed(double v, int places = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

// Quote a field if it contains a comma, quote, or newline.
inline std::string csv_escape(const std::string& field) {
    bool needs_quote = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : file_(path, std::ios::binary), out_(&file_) {
        if (!file_) throw std::runtime_error("cannot open for writing: " + path);
    }
    explicit CsvWriter(std::ostream& os) : out_(&os) {}

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) *out_ << ',';
            *out_ << csv_escape(fields[i]);
        }
        *out_ << '\n';
    }

private:
    std::ofstream file_;
    std::ostream* out_;
};

}  // namespace symatlas
