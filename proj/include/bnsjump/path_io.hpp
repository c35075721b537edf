#pragma once

// CSV exchange format for simulated paths:
//   t,sigma_sq,x_true,x_observed,noise
// one row per grid point in increasing t. x_observed and noise are empty when the path has no noise.

#include "bnsjump/bns_model.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace bnsjump::bns {

inline constexpr const char* kPathCsvHeader = "t,sigma_sq,x_true,x_observed,noise";

struct PathTable {
    std::vector<double> t;
    std::vector<double> sigma_sq;
    std::vector<double> x_true;
    std::optional<std::vector<double>> x_observed;
    std::optional<std::vector<double>> noise;
};

void write_path_csv(std::ostream& out, const VariancePath& variance, const LogPricePath& log_price);
PathTable read_path_csv(std::istream& in);

}  // namespace bnsjump::bns
