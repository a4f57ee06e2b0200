#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/random.hpp"

namespace spade4 {

// Uniformly sampled scalar observations with day-indexed timestamps.
// Sample k (0-based) sits at day t0 + k*dt; there are no gaps.
struct TimeSeries {
    long t0 = 0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double day(std::size_t k) const {
        return static_cast<double>(t0) + static_cast<double>(k) * dt;
    }
    double last_day() const { return day(values.size() - 1); }

    void check() const {
        if (values.empty()) throw ValidationError("time series must not be empty");
        if (!(dt > 0.0)) throw ValidationError("time series requires dt > 0");
    }
};

// Scaling used to turn raw case counts into dimensionless proportions.
struct NormalizationSpec {
    double population = 1.0;
    double scale_fraction = 1.0;  // in (0, 1]

    double divisor() const { return population * scale_fraction; }
    void check() const {
        if (!(population > 0.0)) throw ValidationError("normalization requires population > 0");
        if (!(scale_fraction > 0.0) || scale_fraction > 1.0)
            throw ValidationError("normalization scale fraction must lie in (0, 1]");
    }
};

struct NoiseSpec {
    double eta = 0.0;  // std of the Gaussian multiplier
    std::uint64_t seed = 0;

    void check() const {
        if (eta < 0.0) throw ValidationError("noise level must be >= 0");
    }
};

namespace detail {

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline bool parse_long(const std::string& s, long& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace detail

// Reads a two-column "day,value" CSV with one header row. Day entries must be
// strictly increasing integers with a constant step.
inline TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty file, expected a day,value header");
    if (detail::lower(detail::trim(detail::strip_cr(line))) != "day,value")
        throw ParseError(path.string() + ": line 1: expected header \"day,value\"");

    TimeSeries s;
    long line_no = 1;
    long prev_day = 0;
    long step = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (detail::trim(line).empty()) continue;

        const auto comma = line.find(',');
        const std::string where = path.string() + ": line " + std::to_string(line_no);
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw ParseError(where + ": expected exactly two comma-separated fields");

        long day = 0;
        if (!detail::parse_long(line.substr(0, comma), day))
            throw ParseError(where + ": day must be an integer");
        double value = 0.0;
        if (!detail::parse_double(line.substr(comma + 1), value))
            throw ParseError(where + ": value is not a finite number");

        if (!s.values.empty()) {
            const long d = day - prev_day;
            if (d <= 0) throw ValidationError(where + ": day column must be strictly increasing");
            if (step == 0) {
                step = d;
            } else if (d != step) {
                throw ValidationError(where + ": non-uniform day step (expected " +
                                      std::to_string(step) + ", got " + std::to_string(d) + ")");
            }
        } else {
            s.t0 = day;
        }
        prev_day = day;
        s.values.push_back(value);
    }
    if (s.values.empty())
        throw ValidationError(path.string() + ": no data rows (empty series)");
    s.dt = step == 0 ? 1.0 : static_cast<double>(step);
    return s;
}

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_day(double day) {
    const double r = std::round(day);
    if (std::abs(day - r) < 1e-9) return std::to_string(static_cast<long long>(r));
    return format_value(day);
}

}  // namespace detail

inline void save_csv(const TimeSeries& s, const std::filesystem::path& path) {
    s.check();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "day,value\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        out << detail::format_day(s.day(k)) << ',' << detail::format_value(s.values[k]) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

// Trailing seven-day mean, truncated at the series start. Length preserved.
inline TimeSeries seven_day_average(const TimeSeries& s) {
    s.check();
    if (s.dt != 1.0)
        throw ValidationError("seven_day_average requires daily sampling (dt = 1)");
    TimeSeries out = s;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const std::size_t lo = k >= 6 ? k - 6 : 0;
        double acc = 0.0;
        for (std::size_t j = lo; j <= k; ++j) acc += s.values[j];
        out.values[k] = acc / static_cast<double>(k - lo + 1);
    }
    return out;
}

inline TimeSeries normalize(const TimeSeries& s, const NormalizationSpec& n) {
    s.check();
    n.check();
    TimeSeries out = s;
    const double d = n.divisor();
    for (double& v : out.values) v /= d;
    return out;
}

// Adds eps_k * max|y| to every sample, eps_k i.i.d. Gaussian with mean 0 and
// standard deviation eta. Bit-reproducible for a fixed seed.
inline TimeSeries inject_noise(const TimeSeries& s, const NoiseSpec& spec) {
    s.check();
    spec.check();
    TimeSeries out = s;
    if (spec.eta == 0.0) return out;
    double scale = 0.0;
    for (double v : s.values) scale = std::max(scale, std::abs(v));
    auto eng = make_engine(spec.seed);
    std::normal_distribution<double> eps(0.0, spec.eta);
    for (double& v : out.values) v += eps(eng) * scale;
    return out;
}

// Subseries covering [start_day, end_day] inclusive. The day origin is reset
// to 0 so window-relative training sizes line up across datasets.
inline TimeSeries extract_window(const TimeSeries& s, long start_day, long end_day) {
    s.check();
    if (start_day > end_day)
        throw ValidationError("extract_window: start day exceeds end day");
    auto to_index = [&](long day) -> std::size_t {
        const double x = (static_cast<double>(day) - static_cast<double>(s.t0)) / s.dt;
        const double r = std::round(x);
        if (std::abs(x - r) > 1e-9)
            throw ValidationError("extract_window: day " + std::to_string(day) +
                                  " is not on the sampling grid");
        if (r < 0.0 || r >= static_cast<double>(s.size()))
            throw ValidationError("extract_window: day " + std::to_string(day) +
                                  " is outside the series range");
        return static_cast<std::size_t>(r);
    };
    const std::size_t i0 = to_index(start_day);
    const std::size_t i1 = to_index(end_day);
    TimeSeries out;
    out.t0 = 0;
    out.dt = s.dt;
    out.values.assign(s.values.begin() + static_cast<long>(i0),
                      s.values.begin() + static_cast<long>(i1) + 1);
    return out;
}

// sqrt( sum (truth - predicted)^2 / sum truth^2 ) over the supplied window.
inline double relative_error(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.size() != predicted.size())
        throw ValidationError("relative_error requires windows of equal length");
    if (truth.empty()) throw ValidationError("relative_error: empty window");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = truth[k] - predicted[k];
        num += d * d;
        den += truth[k] * truth[k];
    }
    if (den == 0.0)
        throw ValidationError("relative_error: truth window is identically zero");
    return std::sqrt(num / den);
}

inline double relative_error(const TimeSeries& truth, const TimeSeries& predicted) {
    return relative_error(std::span<const double>(truth.values),
                          std::span<const double>(predicted.values));
}

// First m samples as a standalone series.
inline TimeSeries head(const TimeSeries& s, std::size_t m) {
    s.check();
    if (m == 0 || m > s.size())
        throw ValidationError("head: prefix length out of range");
    TimeSeries out;
    out.t0 = s.t0;
    out.dt = s.dt;
    out.values.assign(s.values.begin(), s.values.begin() + static_cast<long>(m));
    return out;
}

}  // namespace spade4
