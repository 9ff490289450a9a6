// SPDX-License-Identifier: Apache-2.0
//
// Convergence traces as CSV:
//   run,seed,iter,objective,grad_norm,armijo_m,mu_star,max_delta,elapsed_ms
// Reals use 12 significant digits ('.' separator, shortest of fixed and
// scientific notation); lines end in LF.
#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mwsr/cgp.hpp"

namespace mwsr {

inline constexpr std::string_view kTraceHeader = "run,seed,iter,objective,grad_norm,armijo_m,mu_star,max_delta,elapsed_ms";

struct TraceRow {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    IterationRecord record;

    friend bool operator==(const TraceRow& a, const TraceRow& b)
    {
        const auto& x = a.record;
        const auto& y = b.record;
        return a.run == b.run && a.seed == b.seed && x.iter == y.iter && x.objective == y.objective &&
               x.grad_norm == y.grad_norm && x.armijo_m == y.armijo_m && x.water_level == y.water_level &&
               x.max_delta == y.max_delta && x.elapsed_ms == y.elapsed_ms;
    }
};

inline std::string format_real(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

/// Rounds to the value a trace file stores.
inline double round_to_trace(double v)
{
    const auto s = format_real(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows)
{
    os << kTraceHeader << '\n';
    for (const auto& r : rows) {
        const auto& x = r.record;
        os << r.run << ',' << r.seed << ',' << x.iter << ',' << format_real(x.objective) << ','
           << format_real(x.grad_norm) << ',' << x.armijo_m << ',' << format_real(x.water_level) << ','
           << format_real(x.max_delta) << ',' << format_real(x.elapsed_ms) << '\n';
    }
}

namespace detail {

template <class T>
T parse_field(std::string_view field, std::size_t line)
{
    T value{};
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw std::runtime_error("trace csv: bad field '" + std::string(field) + "' on line " + std::to_string(line));
    return value;
}

}  // namespace detail

inline std::vector<TraceRow> parse_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kTraceHeader) throw std::runtime_error("trace csv: missing or wrong header");
    std::vector<TraceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (;;) {
            auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 9) throw std::runtime_error("trace csv: expected 9 fields on line " + std::to_string(lineno));
        TraceRow r;
        r.run = detail::parse_field<std::size_t>(f[0], lineno);
        r.seed = detail::parse_field<std::uint64_t>(f[1], lineno);
        r.record.iter = detail::parse_field<std::size_t>(f[2], lineno);
        r.record.objective = detail::parse_field<double>(f[3], lineno);
        r.record.grad_norm = detail::parse_field<double>(f[4], lineno);
        r.record.armijo_m = detail::parse_field<std::size_t>(f[5], lineno);
        r.record.water_level = detail::parse_field<double>(f[6], lineno);
        r.record.max_delta = detail::parse_field<double>(f[7], lineno);
        r.record.elapsed_ms = detail::parse_field<double>(f[8], lineno);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace mwsr
