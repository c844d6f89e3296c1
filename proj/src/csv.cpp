#include "roduq/csv.hpp"

#include <cstdio>

namespace roduq {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::span<const std::string> header)
    : path_(path), n_columns_(header.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw error("cannot open output file: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    row({}, values);
}

void CsvWriter::row(std::span<const std::string> fields) {
    row(fields, {});
}

void CsvWriter::row(std::span<const std::string> fields,
                    std::span<const double> values) {
    if (fields.size() + values.size() != n_columns_)
        throw error("csv row width mismatch in " + path_.string());
    bool first = true;
    for (const auto& f : fields) {
        out_ << (first ? "" : ",") << f;
        first = false;
    }
    for (const double v : values) {
        out_ << (first ? "" : ",") << format_double(v);
        first = false;
    }
    out_ << '\n';
    if (!out_) throw error("write failure on " + path_.string());
}

}  // namespace roduq
