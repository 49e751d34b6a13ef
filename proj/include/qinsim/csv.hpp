#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qinsim {

// Minimal CSV emitter: one header row, quoted strings when needed, numbers
// at a configurable significant-digit count (default 17, full double
// round-trip).
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out, int precision = 17)
        : out_(out), precision_(precision) {}

    void header(const std::vector<std::string>& names);

    CsvWriter& field(const std::string& value);
    CsvWriter& field(double value);
    CsvWriter& field(std::uint64_t value);
    CsvWriter& field(std::int64_t value);
    CsvWriter& field(int value) { return field(static_cast<std::int64_t>(value)); }
    void end_row();

    static std::string format_double(double value, int precision);

  private:
    void separator();

    std::ostream& out_;
    int precision_;
    bool row_started_ = false;
};

}  // namespace qinsim
