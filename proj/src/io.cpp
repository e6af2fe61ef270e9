#include "arraymem/io.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"

namespace arraymem {

std::string format_double(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw InvalidArgument("cannot format number");
    return std::string(buf, end);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns)
    : out_(out), columns_(std::move(columns)) {}

void CsvWriter::comment(const std::string& text) {
    if (header_written_) throw InvalidArgument("CSV comments must precede the header");
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) out_ << "# " << line << '\n';
}

void CsvWriter::header() {
    for (std::size_t c = 0; c < columns_.size(); ++c) out_ << (c ? "," : "") << columns_[c];
    out_ << '\n';
    header_written_ = true;
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> text;
    text.reserve(values.size());
    for (double v : values) text.push_back(format_double(v));
    cells(text);
}

void CsvWriter::cells(const std::vector<std::string>& values) {
    if (values.size() != columns_.size()) throw InvalidArgument("CSV row width does not match the header");
    if (!header_written_) header();
    for (std::size_t c = 0; c < values.size(); ++c) out_ << (c ? "," : "") << values[c];
    out_ << '\n';
}

nlohmann::json complex_to_json(const Eigen::VectorXcd& v) {
    auto out = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v[k].real(), v[k].imag()});
    return out;
}

} // namespace arraymem
