#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace distsel {

struct DipStatistic {
    double dip = 0.0;
    // 0-based indices into the sorted sample bounding the modal interval.
    std::size_t modal_low = 0;
    std::size_t modal_high = 0;
};

// Hartigan's dip of an ascending sample: the sup-distance between the empirical
// CDF and the closest unimodal CDF, via the greatest convex minorant / least
// concave majorant iteration. The smallest attainable value is 1 / (2n).
DipStatistic dip_statistic_sorted(std::span<const double> sorted);

struct DipResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_boot = 0;
    std::size_t sample_size = 0;
    double modal_low = 0.0;  // modal interval in data units
    double modal_high = 0.0;
};

struct DipTestConfig {
    std::size_t n_boot = 1000;
    std::uint64_t seed = 0;  // replicate r draws from seed + r
};

// Monte Carlo test against the uniform distribution: p is the fraction of n_boot
// uniform samples of the same size whose dip exceeds the observed one. Null
// distributions are cached per (n, n_boot, seed).
DipResult dip_test(std::span<const double> sample, const DipTestConfig& config = {});

} // namespace distsel
