#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arraymem/types.hpp"

namespace arraymem {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Minimal CSV writer: an optional "# " comment block, a header row and
/// numeric rows, all numbers in shortest round-trip form.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> columns);

    /// Writes each line of `text` prefixed by "# ". Must precede the header.
    void comment(const std::string& text);
    void row(const std::vector<double>& values);
    /// Pre-formatted cells (integers, seeds).
    void cells(const std::vector<std::string>& values);

private:
    void header();

    std::ostream& out_;
    std::vector<std::string> columns_;
    bool header_written_ = false;
};

/// [[re, im], ...]
nlohmann::json complex_to_json(const Eigen::VectorXcd& v);

} // namespace arraymem
