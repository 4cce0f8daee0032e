#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpmdd/distance.hpp"
#include "cpmdd/experiment.hpp"

namespace cpmdd {

inline constexpr const char* kBerCsvHeader = "ebn0_db,detector,K,bits,errors,ber,frames,low_confidence";
inline constexpr const char* kDminCsvHeader = "K,d2_min,argmin_e,depth,nobs";

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points);
void write_dmin_csv(std::ostream& os, const std::vector<DistanceReport>& reports);
std::vector<BerPoint> read_ber_csv(std::istream& is);

// Writes `text` to `path`, or to stdout when path is empty or "-". Throws IoError.
void write_text(const std::string& path, const std::string& text);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained SVG with log-scale y axis (BER vs Eb/N0).
std::string render_ber_svg(const std::vector<PlotSeries>& series, const std::string& title);
std::vector<PlotSeries> series_from_points(const std::vector<BerPoint>& points);

}  // namespace cpmdd
