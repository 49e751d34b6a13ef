#include "qinsim/csv.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

namespace qinsim {

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string CsvWriter::format_double(double value, int precision) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    std::ostringstream os;
    os.precision(precision);
    os << value;
    return os.str();
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out_ << ',';
        out_ << (needs_quoting(names[i]) ? quote(names[i]) : names[i]);
    }
    out_ << '\n';
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::field(const std::string& value) {
    separator();
    out_ << (needs_quoting(value) ? quote(value) : value);
    return *this;
}

CsvWriter& CsvWriter::field(double value) {
    separator();
    out_ << format_double(value, precision_);
    return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t value) {
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::field(std::int64_t value) {
    separator();
    out_ << value;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

}  // namespace qinsim
