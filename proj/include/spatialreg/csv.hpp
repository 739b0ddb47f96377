#ifndef SPATIALREG_CSV_HPP
#define SPATIALREG_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace spatialreg {

// RFC-4180-style table: header row required, quoted fields with doubled
// quotes supported, no locale guessing when parsing numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const; // throws if missing
    bool has_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& source_name = "<stream>");
CsvTable read_csv_file(const std::string& path);

// Strict numeric parse; `context` names the cell in the error message.
double parse_csv_number(const std::string& text, const std::string& context);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string csv_format_double(double value); // %.17g

} // namespace spatialreg

#endif
