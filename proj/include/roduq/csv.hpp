#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "roduq/common.hpp"

namespace roduq {

// CSV writer emitting full double precision (%.17g). Every file starts
// with a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::span<const std::string> header);

    void row(std::span<const double> values);
    void row(std::span<const std::string> fields);
    // Mixed row: leading string fields followed by numeric columns.
    void row(std::span<const std::string> fields, std::span<const double> values);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t n_columns_ = 0;
};

std::string format_double(double v);

}  // namespace roduq
