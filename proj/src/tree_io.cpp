#include "swing/tree_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "swing/errors.hpp"

namespace swing {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_row(std::ostream& os, std::span<const double> row) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << fmt(row[j]);
    os << '\n';
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw ContractViolation("matrix CSV: cannot parse '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::vector<double>> read_rows(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(parse_row(line));
    }
    return rows;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw Error("cannot read " + p.string());
    return is;
}

std::string indexed(const char* stem, std::size_t k) { return std::string(stem) + "_" + std::to_string(k) + ".csv"; }

}  // namespace

void write_matrix_csv(std::ostream& os, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) write_row(os, m.row(i));
}

Matrix read_matrix_csv(std::istream& is) {
    const auto rows = read_rows(is);
    SWING_REQUIRE(!rows.empty(), "matrix CSV is empty");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        SWING_REQUIRE(rows[i].size() == m.cols(), "matrix CSV rows have different lengths");
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

void save_tree(const QuantTree& tree, const std::filesystem::path& dir, const std::string& manifest_json) {
    tree.validate();
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < tree.grids.size(); ++k) {
        auto os = open_out(dir / indexed("grid", k));
        write_codebook_csv(os, tree.grids[k]);
    }
    for (std::size_t k = 0; k < tree.transitions.size(); ++k) {
        auto os = open_out(dir / indexed("transition", k));
        write_matrix_csv(os, tree.transitions[k]);
    }
    {
        auto os = open_out(dir / "payoffs.csv");
        for (const auto& v : tree.payoffs) write_row(os, v);
    }
    auto os = open_out(dir / "manifest.json");
    os << manifest_json << '\n';
}

QuantTree load_tree(const std::filesystem::path& dir) {
    QuantTree tree;
    auto pis = open_in(dir / "payoffs.csv");
    tree.payoffs = read_rows(pis);
    const std::size_t n = tree.payoffs.size();
    SWING_REQUIRE(n >= 1, "tree directory holds no dates");
    for (std::size_t k = 0; k < n; ++k) {
        auto is = open_in(dir / indexed("grid", k));
        tree.grids.push_back(read_codebook_csv(is));
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        auto is = open_in(dir / indexed("transition", k));
        tree.transitions.push_back(read_matrix_csv(is));
    }
    tree.validate();
    return tree;
}

std::string load_manifest(const std::filesystem::path& dir) {
    auto is = open_in(dir / "manifest.json");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace swing
