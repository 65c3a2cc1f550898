#include <metamd/dataset_io.hpp>

#include <metamd/errors.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace metamd {

namespace {

const char* kHeader[] = {"study_id", "n_t", "mean_t", "sd_t", "n_c", "mean_c", "sd_c"};
constexpr std::size_t kNumCols = 7;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, std::size_t col,
                       const std::string& what) {
    throw ValidationError(source + ":" + std::to_string(line) + ": column " +
                          std::to_string(col) + " (" + kHeader[col - 1] + "): " + what);
}

double parse_real(const std::string& raw, const std::string& source, std::size_t line,
                  std::size_t col) {
    const std::string s = trim(raw);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        fail(source, line, col, "cannot parse '" + s + "' as a number");
    }
    if (pos != s.size()) fail(source, line, col, "trailing characters in '" + s + "'");
    if (!std::isfinite(v)) fail(source, line, col, "value must be finite");
    return v;
}

std::size_t parse_count(const std::string& raw, const std::string& source,
                        std::size_t line, std::size_t col) {
    const double v = parse_real(raw, source, line, col);
    if (v < 0.0 || v != std::floor(v))
        fail(source, line, col, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(source_name + ": empty file");
    const auto header = split_csv_line(line);
    if (header.size() != kNumCols)
        throw ValidationError(source_name + ":1: expected " + std::to_string(kNumCols) +
                              " header columns, got " + std::to_string(header.size()));
    for (std::size_t i = 0; i < kNumCols; ++i)
        if (trim(header[i]) != kHeader[i])
            throw ValidationError(source_name + ":1: column " + std::to_string(i + 1) +
                                  " must be '" + kHeader[i] + "', got '" +
                                  trim(header[i]) + "'");

    Dataset ds;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kNumCols)
            throw ValidationError(source_name + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(kNumCols) +
                                  " fields, got " + std::to_string(fields.size()));
        StudySummary s;
        s.n_t = parse_count(fields[1], source_name, lineno, 2);
        s.mean_t = parse_real(fields[2], source_name, lineno, 3);
        const double sd_t = parse_real(fields[3], source_name, lineno, 4);
        s.n_c = parse_count(fields[4], source_name, lineno, 5);
        s.mean_c = parse_real(fields[5], source_name, lineno, 6);
        const double sd_c = parse_real(fields[6], source_name, lineno, 7);
        s.var_t = sd_t * sd_t;
        s.var_c = sd_c * sd_c;
        ds.ids.push_back(trim(fields[0]));
        ds.studies.push_back(s);
    }
    if (ds.studies.empty())
        throw ValidationError(source_name + ": no data rows");
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);
    return read_dataset_csv(in, path);
}

}  // namespace metamd
