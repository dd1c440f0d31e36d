#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evm/common.hpp"

namespace evm {

// N examples over n binary variables, stored as sorted indices of the
// 1-valued variables per row. The corpora this targets are wide and sparse.
struct BinaryDataset {
    int n_vars = 0;
    std::vector<std::vector<int>> rows;

    std::size_t num_rows() const { return rows.size(); }

    void validate() const {
        for (const auto& row : rows) {
            int prev = -1;
            for (int idx : row) {
                if (idx <= prev || idx >= n_vars)
                    throw Error("dataset row has out-of-range or unsorted indices");
                prev = idx;
            }
        }
    }

    std::vector<std::uint8_t> dense_row(std::size_t i) const {
        std::vector<std::uint8_t> x(static_cast<std::size_t>(n_vars), 0);
        for (int idx : rows[i]) x[static_cast<std::size_t>(idx)] = 1;
        return x;
    }

    static std::vector<int> sparsify(const std::vector<std::uint8_t>& x) {
        std::vector<int> row;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j]) row.push_back(static_cast<int>(j));
        return row;
    }
};

struct LabeledDataset {
    BinaryDataset data;
    std::vector<int> labels;
    int n_classes = 0;

    void validate() const {
        data.validate();
        if (labels.size() != data.num_rows())
            throw Error("label count does not match example count");
        for (int y : labels)
            if (y < 0 || y >= n_classes) throw Error("label out of range");
    }
};

namespace detail {

// One CSV line of 0/1 tokens; `want_label` peels the final column off as an
// integer class label.
inline void parse_csv_line(const std::string& line, std::size_t line_no, bool want_label,
                           std::vector<int>& row_out, int& label_out, int& n_cols_out) {
    row_out.clear();
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    for (;;) {
        std::size_t comma = line.find(',', pos);
        std::size_t end = comma == std::string::npos ? line.size() : comma;
        fields.emplace_back(line.data() + pos, end - pos);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    std::size_t n_attrs = want_label ? fields.size() - 1 : fields.size();
    for (std::size_t col = 0; col < n_attrs; ++col) {
        std::string_view tok = fields[col];
        if (tok == "1")
            row_out.push_back(static_cast<int>(col));
        else if (tok != "0")
            throw Error("line " + std::to_string(line_no) + ": token '" + std::string(tok) +
                        "' is not 0 or 1");
    }
    if (want_label) {
        std::string tok(fields.back());
        std::size_t parsed = 0;
        int v = -1;
        try {
            v = std::stoi(tok, &parsed);
        } catch (const std::exception&) {
            parsed = 0;
        }
        if (tok.empty() || parsed != tok.size() || v < 0)
            throw Error("line " + std::to_string(line_no) + ": bad label '" + tok + "'");
        label_out = v;
    }
    n_cols_out = static_cast<int>(fields.size());
}

}  // namespace detail

inline BinaryDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    BinaryDataset ds;
    std::string line;
    std::size_t line_no = 0;
    int n_cols = -1;
    std::vector<int> row;
    int label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int cols = 0;
        detail::parse_csv_line(line, line_no, false, row, label, cols);
        if (n_cols == -1)
            n_cols = cols;
        else if (cols != n_cols)
            throw Error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n_cols) + " fields, got " + std::to_string(cols));
        ds.rows.push_back(row);
    }
    if (n_cols == -1) throw Error(path + " contains no data rows");
    ds.n_vars = n_cols;
    return ds;
}

inline LabeledDataset load_labeled_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    LabeledDataset ds;
    std::string line;
    std::size_t line_no = 0;
    int n_cols = -1;
    std::vector<int> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int cols = 0;
        int label = 0;
        detail::parse_csv_line(line, line_no, true, row, label, cols);
        if (cols < 2) throw Error("line " + std::to_string(line_no) + ": need attributes and a label");
        if (n_cols == -1)
            n_cols = cols;
        else if (cols != n_cols)
            throw Error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(n_cols) + " fields, got " + std::to_string(cols));
        ds.data.rows.push_back(row);
        ds.labels.push_back(label);
        if (label + 1 > ds.n_classes) ds.n_classes = label + 1;
    }
    if (n_cols == -1) throw Error(path + " contains no data rows");
    ds.data.n_vars = n_cols - 1;
    ds.validate();
    return ds;
}

inline void write_csv_row(std::ostream& out, const std::vector<int>& ones, int n_vars) {
    auto it = ones.begin();
    for (int j = 0; j < n_vars; ++j) {
        if (j) out << ',';
        if (it != ones.end() && *it == j) {
            out << '1';
            ++it;
        } else {
            out << '0';
        }
    }
}

inline void save_csv(const BinaryDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& row : ds.rows) {
        write_csv_row(out, row, ds.n_vars);
        out << '\n';
    }
}

inline void save_labeled_csv(const LabeledDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (std::size_t i = 0; i < ds.data.rows.size(); ++i) {
        write_csv_row(out, ds.data.rows[i], ds.data.n_vars);
        out << ',' << ds.labels[i] << '\n';
    }
}

}  // namespace evm
