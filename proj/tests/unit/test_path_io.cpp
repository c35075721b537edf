#include "bnsjump/common.hpp"
#include "bnsjump/path_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace bnsjump;
using namespace bnsjump::bns;

namespace {

SimulatedPath sample(double noise_std) {
    ModelParams p;
    p.rho = -0.5;
    p.theta = 0.5;
    p.sigma0_sq = 0.04;
    p.spec_base = {1.0, 20.0};
    p.spec_strong = {5.0, 20.0};
    SimulationConfig cfg;
    cfg.grid = {0.0, 0.01, 50};
    cfg.noise = {noise_std};
    return simulate_path(p, cfg, 3, 0);
}

}  // namespace

TEST(PathCsv, RoundTripIsExact) {
    for (double std : {0.0, 0.002}) {
        const auto sp = sample(std);
        std::stringstream ss;
        write_path_csv(ss, sp.variance, sp.log_price);
        const auto table = read_path_csv(ss);
        ASSERT_EQ(table.t.size(), sp.variance.grid.size());
        EXPECT_EQ(table.sigma_sq, sp.variance.values);
        EXPECT_EQ(table.x_true, sp.log_price.x_true);
        EXPECT_EQ(table.x_observed.has_value(), std > 0.0);
        if (std > 0.0) {
            EXPECT_EQ(*table.x_observed, *sp.log_price.x_observed);
            EXPECT_EQ(*table.noise, *sp.log_price.noise);
        }
        for (std::size_t k = 0; k < table.t.size(); ++k) EXPECT_EQ(table.t[k], sp.variance.grid.time(k));
    }
}

TEST(PathCsv, HeaderAndEmptyNoiseColumns) {
    const auto sp = sample(0.0);
    std::ostringstream ss;
    write_path_csv(ss, sp.variance, sp.log_price);
    std::istringstream in(ss.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kPathCsvHeader);
    std::getline(in, line);
    EXPECT_EQ(line.substr(line.size() - 2), ",,");
}

TEST(PathCsv, RejectsMalformedInput) {
    std::istringstream bad_header("t,sigma\n0,1\n");
    EXPECT_THROW(read_path_csv(bad_header), ParseError);
    std::istringstream not_increasing("t,sigma_sq,x_true,x_observed,noise\n0,1,0,,\n0,1,0,,\n");
    EXPECT_THROW(read_path_csv(not_increasing), ParseError);
    std::istringstream mixed("t,sigma_sq,x_true,x_observed,noise\n0,1,0,,\n1,1,0,0.1,0.1\n");
    EXPECT_THROW(read_path_csv(mixed), ParseError);
    std::istringstream garbage("t,sigma_sq,x_true,x_observed,noise\n0,abc,0,,\n");
    try {
        read_path_csv(garbage);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(PathCsv, GridMismatchIsRejected) {
    auto sp = sample(0.0);
    sp.log_price.grid.n_steps += 1;
    std::ostringstream ss;
    EXPECT_THROW(write_path_csv(ss, sp.variance, sp.log_price), IncompatibleGrid);
}
