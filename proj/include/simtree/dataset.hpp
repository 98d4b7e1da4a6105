#pragma once

// Labeled instance datasets and plain CSV parsing (header row, comma
// separated, no quoting).

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "simtree/common.hpp"

namespace simtree {

struct Dataset {
    std::size_t q = 0;                     // feature dimension
    std::size_t n_classes = 0;
    std::vector<double> features;          // n x q, row major
    std::vector<int> labels;               // dense, 1..n_classes, by first appearance
    std::vector<std::string> label_names;  // original token for each dense id

    std::size_t size() const { return labels.size(); }
    const double* row(std::size_t i) const { return features.data() + i * q; }
};

namespace csv {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Strict finite-double parse; `where` names the file location for errors.
inline double parse_number(const std::string& cell, const std::string& where) {
    const std::string t = trim(cell);
    double v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw Error(where + ": expected a finite number, got \"" + cell + "\"");
    return v;
}

// Reads all lines (header first); skips a trailing blank line.
inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error(path + ": empty file");
    return lines;
}

}  // namespace csv

// Loads a dataset CSV. All columns except `label_column` are numeric
// features; labels may be arbitrary tokens and are re-indexed densely by
// first appearance. Line numbers in errors are 1-based physical lines.
inline Dataset load_dataset(const std::string& path, const std::string& label_column = "label") {
    const auto lines = csv::read_lines(path);
    const auto header = csv::split(lines[0]);
    std::optional<std::size_t> label_idx;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == label_column) label_idx = c;
    if (!label_idx) throw Error(path + ": no column named \"" + label_column + "\" in header");
    if (header.size() < 2) throw Error(path + ": need at least one feature column besides the label");
    if (lines.size() < 2) throw Error(path + ": no data rows");

    Dataset d;
    d.q = header.size() - 1;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = csv::split(lines[r]);
        const std::string where = path + " line " + std::to_string(r + 1);
        if (cells.size() != header.size())
            throw Error(where + ": expected " + std::to_string(header.size()) + " columns, got " +
                        std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == *label_idx) continue;
            d.features.push_back(csv::parse_number(cells[c], where));
        }
        const std::string& tok = cells[*label_idx];
        int id = 0;
        for (std::size_t k = 0; k < d.label_names.size(); ++k)
            if (d.label_names[k] == tok) id = int(k) + 1;
        if (id == 0) {
            d.label_names.push_back(tok);
            id = int(d.label_names.size());
        }
        d.labels.push_back(id);
    }
    d.n_classes = d.label_names.size();
    return d;
}

}  // namespace simtree
