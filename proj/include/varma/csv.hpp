#pragma once

#include <string>

#include "varma/lagpoly.hpp"
#include "varma/model.hpp"

namespace varma {

// TimeSeries CSV: header "t,y1,...,yd", one row per time index, full
// precision so a written series re-ingests losslessly.
std::string time_series_to_csv(const TimeSeries& series);
TimeSeries time_series_from_csv(const std::string& text);
TimeSeries read_time_series(const std::string& path);

// ContaminationSpec CSV: header "t,delta,zeta1,...,zetad".
std::string contamination_to_csv(const ContaminationSpec& spec);

// IndexSet CSV: single column of retained indices.
std::string index_set_to_csv(const IndexSet& H);

// PowerSeries CSV: columns lag,row,col,value.
std::string power_series_to_csv(const PowerSeries& series);

// Full-precision formatting of one double (round-trips through strtod).
std::string format_full(double x);

// Writes content to path atomically (temp file + rename); creates parent
// directories as needed.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace varma
