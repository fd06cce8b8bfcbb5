#pragma once

#include <string>

#include "gpanel/dgp.hpp"

namespace gpanel {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

// Strict double parser (whole cell must parse). Throws DataError.
double parse_double(const std::string& cell, const std::string& where);
long parse_long(const std::string& cell, const std::string& where);

// Long-format panel: header `unit,time,y[,g0,sigma]`, unit/time/g0 1-based.
// Truth columns are written when the panel carries them.
std::string panel_to_csv(const PanelData& data);
void write_panel_csv(const PanelData& data, const std::string& path);

// Requires a complete unit x time grid; names the offending line on error.
PanelData panel_from_csv(const std::string& text);
PanelData read_panel_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gpanel
