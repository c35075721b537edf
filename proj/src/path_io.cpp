#include "bnsjump/path_io.hpp"

#include "bnsjump/common.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace bnsjump::bns {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void write_path_csv(std::ostream& out, const VariancePath& variance, const LogPricePath& log_price) {
    if (!(variance.grid == log_price.grid)) throw IncompatibleGrid("write_path_csv: variance and log-price grids differ");
    const bool noisy = log_price.x_observed.has_value() && log_price.noise.has_value();
    out << kPathCsvHeader << '\n';
    for (std::size_t k = 0; k < variance.grid.size(); ++k) {
        out << format_double(variance.grid.time(k)) << ',' << format_double(variance.values[k]) << ','
            << format_double(log_price.x_true[k]) << ',';
        if (noisy) out << format_double((*log_price.x_observed)[k]) << ',' << format_double((*log_price.noise)[k]);
        else out << ',';
        out << '\n';
    }
}

PathTable read_path_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != kPathCsvHeader) {
        throw ParseError(std::string("expected header '") + kPathCsvHeader + "'", line_no);
    }
    PathTable table;
    std::vector<double> observed, noise;
    bool any_noise = false, any_missing = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(trim(line));
        if (fields.size() != 5) throw ParseError("expected 5 fields", line_no);
        const double t = parse_double(fields[0], line_no);
        if (!table.t.empty() && !(t > table.t.back())) throw ParseError("t must be strictly increasing", line_no);
        table.t.push_back(t);
        table.sigma_sq.push_back(parse_double(fields[1], line_no));
        table.x_true.push_back(parse_double(fields[2], line_no));
        if (trim(fields[3]).empty() || trim(fields[4]).empty()) {
            any_missing = true;
        } else {
            any_noise = true;
            observed.push_back(parse_double(fields[3], line_no));
            noise.push_back(parse_double(fields[4], line_no));
        }
        if (any_noise && any_missing) throw ParseError("observed/noise columns must be all present or all empty", line_no);
    }
    if (any_noise) {
        table.x_observed = std::move(observed);
        table.noise = std::move(noise);
    }
    return table;
}

}  // namespace bnsjump::bns
