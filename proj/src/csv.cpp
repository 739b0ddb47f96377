#include "spatialreg/csv.hpp"
#include "spatialreg/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spatialreg {

std::size_t CsvTable::column_index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error("csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

namespace {

// Splits one logical CSV record; `line_no` is advanced across quoted
// newlines. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no,
                 const std::string& source) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool started = false;
    int c;
    while ((c = in.get()) != std::char_traits<char>::eof()) {
        started = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            if (!field.empty())
                throw Error("csv " + source + ":" + std::to_string(line_no) +
                            ": quote inside unquoted field");
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else if (c == '\n') {
            ++line_no;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (in_quotes)
        throw Error("csv " + source + ":" + std::to_string(line_no) + ": unterminated quote");
    if (!started) return false;
    fields.push_back(std::move(field));
    return true;
}

} // namespace

CsvTable read_csv(std::istream& in, const std::string& source_name) {
    CsvTable table;
    std::size_t line_no = 1;
    std::vector<std::string> record;
    if (!read_record(in, record, line_no, source_name))
        throw Error("csv " + source_name + ": empty file, header row required");
    table.header = record;
    for (const auto& name : table.header)
        if (name.empty())
            throw Error("csv " + source_name + ": empty header field");
    while (read_record(in, record, line_no, source_name)) {
        if (record.size() == 1 && record[0].empty()) continue; // trailing blank line
        if (record.size() != table.header.size())
            throw Error("csv " + source_name + ":" + std::to_string(line_no - 1) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(record.size()));
        table.rows.push_back(record);
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("csv: cannot open '" + path + "'");
    return read_csv(in, path);
}

double parse_csv_number(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw Error("csv " + context + ": unparseable numeric '" + text + "'");
    return value;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    const auto write_field = [&out](const std::string& field) {
        if (field.find_first_of(",\"\n\r") == std::string::npos) {
            out << field;
            return;
        }
        out << '"';
        for (const char c : field) {
            if (c == '"') out << '"';
            out << c;
        }
        out << '"';
    };
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        write_field(header[j]);
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            write_field(row[j]);
        }
        out << '\n';
    }
}

std::string csv_format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace spatialreg
