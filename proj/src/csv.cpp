#include "gpanel/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gpanel/errors.hpp"

namespace gpanel {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& where) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || cell.empty()) {
        throw DataError(where + ": cannot parse '" + cell + "' as a number");
    }
    return value;
}

long parse_long(const std::string& cell, const std::string& where) {
    long value = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || cell.empty()) {
        throw DataError(where + ": cannot parse '" + cell + "' as an integer");
    }
    return value;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string panel_to_csv(const PanelData& data) {
    const bool truth = data.g0.has_value() && data.sigma.has_value();
    std::string out = truth ? "unit,time,y,g0,sigma\n" : "unit,time,y\n";
    for (int i = 0; i < data.n; ++i) {
        for (int s = 0; s < data.t; ++s) {
            out += std::to_string(i + 1);
            out += ',';
            out += std::to_string(s + 1);
            out += ',';
            out += format_double(data.at(i, s));
            if (truth) {
                out += ',';
                out += std::to_string((*data.g0)[i] + 1);
                out += ',';
                out += format_double((*data.sigma)[i]);
            }
            out += '\n';
        }
    }
    return out;
}

PanelData panel_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw DataError("panel CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    bool has_g0 = false;
    bool has_sigma = false;
    if (line == "unit,time,y") {
    } else if (line == "unit,time,y,g0") {
        has_g0 = true;
    } else if (line == "unit,time,y,sigma") {
        has_sigma = true;
    } else if (line == "unit,time,y,g0,sigma") {
        has_g0 = has_sigma = true;
    } else {
        throw DataError("panel CSV line 1: header must be unit,time,y[,g0][,sigma], got '" + line + "'");
    }
    const std::size_t expected_cells = 3 + has_g0 + has_sigma;

    struct Record {
        int unit, time;
        double y;
        int g0;
        double sigma;
    };
    std::vector<Record> records;
    int max_unit = 0;
    int max_time = 0;
    int line_no = 1;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        const std::string where = "panel CSV line " + std::to_string(line_no);
        if (cells.size() != expected_cells) {
            throw DataError(where + ": expected " + std::to_string(expected_cells) +
                            " cells, got " + std::to_string(cells.size()));
        }
        Record rec{};
        rec.unit = static_cast<int>(parse_long(cells[0], where));
        rec.time = static_cast<int>(parse_long(cells[1], where));
        rec.y = parse_double(cells[2], where);
        if (rec.unit < 1 || rec.time < 1) {
            throw DataError(where + ": unit and time must be 1-based positive integers");
        }
        std::size_t next = 3;
        if (has_g0) rec.g0 = static_cast<int>(parse_long(cells[next++], where));
        if (has_sigma) rec.sigma = parse_double(cells[next++], where);
        max_unit = std::max(max_unit, rec.unit);
        max_time = std::max(max_time, rec.time);
        records.push_back(rec);
    }
    if (records.empty()) throw DataError("panel CSV: no data rows");

    PanelData data;
    data.n = max_unit;
    data.t = max_time;
    data.y.assign(static_cast<std::size_t>(max_unit) * max_time, 0.0);
    std::vector<char> seen(data.y.size(), 0);
    std::vector<int> g0(max_unit, -1);
    std::vector<double> sigma(max_unit, -1.0);

    for (const Record& rec : records) {
        const std::size_t idx = static_cast<std::size_t>(rec.unit - 1) * max_time + (rec.time - 1);
        if (seen[idx]) {
            throw DataError("panel CSV: duplicate cell for unit " + std::to_string(rec.unit) +
                            ", time " + std::to_string(rec.time));
        }
        seen[idx] = 1;
        data.y[idx] = rec.y;
        if (has_g0) {
            if (g0[rec.unit - 1] == -1) {
                g0[rec.unit - 1] = rec.g0;
            } else if (g0[rec.unit - 1] != rec.g0) {
                throw DataError("panel CSV: unit " + std::to_string(rec.unit) +
                                " has inconsistent g0 values");
            }
        }
        if (has_sigma) {
            if (sigma[rec.unit - 1] < 0.0) {
                sigma[rec.unit - 1] = rec.sigma;
            } else if (sigma[rec.unit - 1] != rec.sigma) {
                throw DataError("panel CSV: unit " + std::to_string(rec.unit) +
                                " has inconsistent sigma values");
            }
        }
    }
    for (int i = 0; i < max_unit; ++i) {
        for (int s = 0; s < max_time; ++s) {
            if (!seen[static_cast<std::size_t>(i) * max_time + s]) {
                throw DataError("panel CSV: missing cell for unit " + std::to_string(i + 1) +
                                ", time " + std::to_string(s + 1));
            }
        }
    }
    if (has_g0) {
        for (int& g : g0) {
            if (g < 1) throw DataError("panel CSV: g0 labels must be 1-based positive integers");
            g -= 1;
        }
        data.g0 = std::move(g0);
    }
    if (has_sigma) data.sigma = std::move(sigma);
    return data;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << text;
    if (!out) throw DataError("failed while writing: " + path);
}

void write_panel_csv(const PanelData& data, const std::string& path) {
    write_text_file(path, panel_to_csv(data));
}

PanelData read_panel_csv(const std::string& path) {
    return panel_from_csv(read_text_file(path));
}

}  // namespace gpanel
