#include "inpr/csv_io.hpp"

#include "inpr/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace inpr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

bool next_line(std::istream& in, std::string& line, long& number) {
    if (!std::getline(in, line)) return false;
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_double(const std::string& s, long line, const char* what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last)
        throw ParseError(std::string("non-numeric ") + what + " '" + s + "'", line);
    if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what + " '" + s + "'", line);
    return v;
}

int parse_id(const std::string& s, long line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("source_id '" + s + "' is not an integer", line);
    if (v < 0) throw ParseError("source_id must be non-negative", line);
    return v;
}

struct Rows {
    std::vector<double> xs;
    std::vector<double> ys;
};

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

MultiSourceData read_multisource_csv(std::istream& in) {
    std::string line;
    long number = 0;
    if (!next_line(in, line, number)) throw InputError("CSV input is empty (a header row is required)");
    const auto header = split_fields(line);
    if (header.size() < 3 || header.front() != "source_id" || header.back() != "y")
        throw ParseError("header must be source_id,x1[,x2,...],y", number);
    const std::size_t dim = header.size() - 2;
    for (std::size_t j = 0; j < dim; ++j)
        if (header[j + 1] != "x" + std::to_string(j + 1))
            throw ParseError("expected column x" + std::to_string(j + 1) + ", found '" + header[j + 1] + "'", number);

    std::map<int, Rows> groups;
    while (next_line(in, line, number)) {
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto f = split_fields(line);
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                             number);
        Rows& g = groups[parse_id(f[0], number)];
        for (std::size_t j = 0; j < dim; ++j) g.xs.push_back(parse_double(f[j + 1], number, "coordinate"));
        g.ys.push_back(parse_double(f.back(), number, "response"));
    }
    if (!groups.contains(0)) throw InputError("no rows with source_id 0: the target sample is missing");

    std::vector<SampleSet> sets;
    for (auto& [id, rows] : groups) {
        SampleSet s;
        s.source_id = id;
        const auto n = static_cast<Eigen::Index>(rows.ys.size());
        s.xs = Eigen::Map<const PointMatrix>(rows.xs.data(), n, static_cast<Eigen::Index>(dim));
        s.ys = Eigen::Map<const Vector>(rows.ys.data(), n);
        sets.push_back(std::move(s));
    }
    return MultiSourceData(std::move(sets));
}

MultiSourceData ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_multisource_csv(in);
}

void write_multisource_csv(std::ostream& out, const MultiSourceData& data) {
    out << "source_id";
    for (int j = 0; j < data.dim(); ++j) out << ",x" << j + 1;
    out << ",y\n";
    for (const auto& s : data.sets())
        for (Eigen::Index i = 0; i < s.xs.rows(); ++i) {
            out << s.source_id;
            for (int j = 0; j < data.dim(); ++j) out << ',' << format_double(s.xs(i, j));
            out << ',' << format_double(s.ys[i]) << '\n';
        }
}

void write_curve_csv(std::ostream& out, const CurveTable& curve) {
    const bool bands = curve.lower.has_value() && curve.upper.has_value();
    if (curve.estimate.size() != curve.xs.rows()) throw ShapeError("curve estimate does not match the grid");
    if (bands && (curve.lower->size() != curve.xs.rows() || curve.upper->size() != curve.xs.rows()))
        throw ShapeError("curve bands do not match the grid");
    for (Eigen::Index j = 0; j < curve.xs.cols(); ++j) out << (j ? ",x" : "x") << j + 1;
    out << ",estimate" << (bands ? ",lower,upper\n" : "\n");
    for (Eigen::Index i = 0; i < curve.xs.rows(); ++i) {
        for (Eigen::Index j = 0; j < curve.xs.cols(); ++j) out << format_double(curve.xs(i, j)) << ',';
        out << format_double(curve.estimate[i]);
        if (bands) out << ',' << format_double((*curve.lower)[i]) << ',' << format_double((*curve.upper)[i]);
        out << '\n';
    }
}

CurveTable read_curve_csv(std::istream& in) {
    std::string line;
    long number = 0;
    if (!next_line(in, line, number)) throw InputError("curve CSV is empty (a header row is required)");
    const auto header = split_fields(line);
    if (header.size() < 2) throw ParseError("curve header needs x1[,...] and a value column", number);
    const std::size_t dim = header.size() - 1;
    std::vector<double> xs;
    std::vector<double> ys;
    while (next_line(in, line, number)) {
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto f = split_fields(line);
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                             number);
        for (std::size_t j = 0; j < dim; ++j) xs.push_back(parse_double(f[j], number, "coordinate"));
        ys.push_back(parse_double(f.back(), number, "value"));
    }
    if (ys.empty()) throw InputError("curve CSV has no rows");
    CurveTable out;
    const auto n = static_cast<Eigen::Index>(ys.size());
    out.xs = Eigen::Map<const PointMatrix>(xs.data(), n, static_cast<Eigen::Index>(dim));
    out.estimate = Eigen::Map<const Vector>(ys.data(), n);
    return out;
}

}  // namespace inpr
