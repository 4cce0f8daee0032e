#include "cpmdd/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cpmdd/errors.hpp"

namespace cpmdd {

std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points)
{
    os << kBerCsvHeader << '\n';
    for (const auto& p : points)
        os << format_double(p.ebn0_db) << ',' << p.detector << ',' << p.K << ',' << p.bits << ',' << p.errors << ','
           << format_double(p.ber) << ',' << p.frames << ',' << (p.low_confidence ? 1 : 0) << '\n';
}

void write_dmin_csv(std::ostream& os, const std::vector<DistanceReport>& reports)
{
    os << kDminCsvHeader << '\n';
    for (const auto& r : reports)
        os << r.K << ',' << format_double(r.d2_min) << ',' << r.argmin_e.to_string() << ',' << r.depth << ','
           << r.n_obs << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s)
{
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in CSV");
    return v;
}

long long parse_int(const std::string& s)
{
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw IoError("bad integer '" + s + "' in CSV");
    return v;
}

}  // namespace

std::vector<BerPoint> read_ber_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kBerCsvHeader) throw IoError("missing BER CSV header");
    std::vector<BerPoint> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw IoError("BER CSV line " + std::to_string(lineno) + ": expected 8 fields");
        BerPoint p;
        p.ebn0_db = parse_double(f[0]);
        p.detector = f[1];
        p.K = static_cast<int>(parse_int(f[2]));
        p.bits = parse_int(f[3]);
        p.errors = parse_int(f[4]);
        p.ber = parse_double(f[5]);
        p.frames = parse_int(f[6]);
        p.low_confidence = parse_int(f[7]) != 0;
        out.push_back(p);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw IoError("failed writing '" + path + "'");
}

std::vector<PlotSeries> series_from_points(const std::vector<BerPoint>& points)
{
    std::vector<PlotSeries> out;
    for (const auto& p : points) {
        const std::string name = p.K > 0 ? p.detector + " K=" + std::to_string(p.K) : p.detector;
        auto it = std::find_if(out.begin(), out.end(), [&](const PlotSeries& s) { return s.name == name; });
        if (it == out.end()) {
            out.push_back({name, {}, {}});
            it = out.end() - 1;
        }
        if (p.ber > 0.0 && std::isfinite(p.ebn0_db)) {
            it->x.push_back(p.ebn0_db);
            it->y.push_back(p.ber);
        }
    }
    return out;
}

std::string render_ber_svg(const std::vector<PlotSeries>& series, const std::string& title)
{
    constexpr double W = 640, H = 480, left = 70, right = 170, top = 40, bottom = 60;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
        ymin = 1e-5;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    const double dmin = std::floor(std::log10(ymin));
    const double dmax = std::max(std::ceil(std::log10(ymax)), dmin + 1);
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (dmax - std::log10(y)) / (dmax - dmin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    for (double d = dmin; d <= dmax; d += 1.0) {
        const double y = py(std::pow(10.0, d));
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    const int xticks = 6;
    for (int i = 0; i <= xticks; ++i) {
        const double xv = xmin + (xmax - xmin) * i / xticks;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << std::round(xv * 10) / 10 << "</text>\n";
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">Eb/N0 (dB)</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << top + ph / 2 << ")\">BER</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 8];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace cpmdd
