#include "distsel/dip.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <tuple>
#include <vector>

#include "distsel/error.hpp"
#include "distsel/parallel.hpp"

namespace distsel {

namespace {

// Working buffers for the 1-based GCM/LCM bookkeeping.
struct DipWorkspace {
    std::vector<std::size_t> mn, mj, gcm, lcm;

    void resize(std::size_t n) {
        mn.resize(n + 1);
        mj.resize(n + 1);
        gcm.resize(n + 1);
        lcm.resize(n + 1);
    }
};

// x is 1-based: x[1..n] ascending. Returns 2n * dip plus the modal interval.
double dip_core(const double* x, std::size_t n, DipWorkspace& ws, std::size_t& low_out, std::size_t& high_out) {
    ws.resize(n);
    auto& mn = ws.mn;
    auto& mj = ws.mj;
    auto& gcm = ws.gcm;
    auto& lcm = ws.lcm;

    std::size_t low = 1;
    std::size_t high = n;
    double dip = 1.0;
    low_out = low;
    high_out = high;
    if (n < 2 || x[n] == x[1]) {
        return dip;
    }

    // Change points of the greatest convex minorant of (x_j, j).
    mn[1] = 1;
    for (std::size_t j = 2; j <= n; ++j) {
        mn[j] = j - 1;
        while (true) {
            const std::size_t mnj = mn[j];
            const std::size_t mnmnj = mn[mnj];
            if (mnj == 1 || (x[j] - x[mnj]) * static_cast<double>(mnj - mnmnj) <
                                (x[mnj] - x[mnmnj]) * static_cast<double>(j - mnj)) {
                break;
            }
            mn[j] = mnmnj;
        }
    }
    // Change points of the least concave majorant.
    mj[n] = n;
    for (std::size_t k = n - 1; k >= 1; --k) {
        mj[k] = k + 1;
        while (true) {
            const std::size_t mjk = mj[k];
            const std::size_t mjmjk = mj[mjk];
            // Both index differences are negative here.
            const double span_next = static_cast<double>(mjk) - static_cast<double>(mjmjk);
            const double span_here = static_cast<double>(k) - static_cast<double>(mjk);
            if (mjk == n || (x[k] - x[mjk]) * span_next < (x[mjk] - x[mjmjk]) * span_here) {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    while (true) {
        // GCM change points from high down to low.
        std::size_t i = 1;
        gcm[1] = high;
        while (gcm[i] > low) {
            gcm[i + 1] = mn[gcm[i]];
            ++i;
        }
        const std::size_t l_gcm = i;
        std::size_t ig = l_gcm;
        std::size_t ix = ig - 1;

        // LCM change points from low up to high.
        i = 1;
        lcm[1] = low;
        while (lcm[i] < high) {
            lcm[i + 1] = mj[lcm[i]];
            ++i;
        }
        const std::size_t l_lcm = i;
        std::size_t ih = l_lcm;
        std::size_t iv = 2;

        // Largest distance between GCM and LCM on [low, high].
        long double d = 0.0L;
        if (l_gcm != 2 || l_lcm != 2) {
            do {
                const std::size_t gcmix = gcm[ix];
                const std::size_t lcmiv = lcm[iv];
                if (gcmix > lcmiv) {
                    const std::size_t gcmi1 = gcm[ix + 1];
                    const long double dx =
                        static_cast<long double>(lcmiv) - static_cast<long double>(gcmi1) + 1.0L -
                        (static_cast<long double>(x[lcmiv]) - x[gcmi1]) * static_cast<long double>(gcmix - gcmi1) /
                            (x[gcmix] - x[gcmi1]);
                    ++iv;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv - 1;
                    }
                } else {
                    const std::size_t lcmiv1 = lcm[iv - 1];
                    const long double dx =
                        (static_cast<long double>(x[gcmix]) - x[lcmiv1]) * static_cast<long double>(lcmiv - lcmiv1) /
                            (x[lcmiv] - x[lcmiv1]) -
                        (static_cast<long double>(gcmix) - static_cast<long double>(lcmiv1) - 1.0L);
                    --ix;
                    if (dx >= d) {
                        d = dx;
                        ig = ix + 1;
                        ih = iv;
                    }
                }
                if (ix < 1) {
                    ix = 1;
                }
                if (iv > l_lcm) {
                    iv = l_lcm;
                }
            } while (gcm[ix] != lcm[iv]);
        } else {
            d = 1.0L;
        }

        if (d < dip) {
            break;
        }

        // Dips of the convex minorant and concave majorant outside the modal interval.
        double dip_l = 0.0;
        for (std::size_t j = ig; j < l_gcm; ++j) {
            double max_t = 1.0;
            const std::size_t jb = gcm[j + 1];
            const std::size_t je = gcm[j];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double c = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::size_t jj = jb; jj <= je; ++jj) {
                    const double t = static_cast<double>(jj - jb + 1) - (x[jj] - x[jb]) * c;
                    max_t = std::max(max_t, t);
                }
            }
            dip_l = std::max(dip_l, max_t);
        }
        double dip_u = 0.0;
        for (std::size_t j = ih; j < l_lcm; ++j) {
            double max_t = 1.0;
            const std::size_t jb = lcm[j];
            const std::size_t je = lcm[j + 1];
            if (je - jb > 1 && x[je] != x[jb]) {
                const double c = static_cast<double>(je - jb) / (x[je] - x[jb]);
                for (std::size_t jj = jb; jj <= je; ++jj) {
                    const double t = (x[jj] - x[jb]) * c - (static_cast<double>(jj) - static_cast<double>(jb) - 1.0);
                    max_t = std::max(max_t, t);
                }
            }
            dip_u = std::max(dip_u, max_t);
        }
        dip = std::max(dip, std::max(dip_l, dip_u));

        // Without this check the iteration can cycle forever.
        if (low == gcm[ig] && high == lcm[ih]) {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    low_out = low;
    high_out = high;
    return dip;
}

double dip_of(std::span<const double> sorted_one_based_tail, DipWorkspace& ws) {
    // sorted_one_based_tail has a dummy element at index 0.
    std::size_t lo = 0;
    std::size_t hi = 0;
    const std::size_t n = sorted_one_based_tail.size() - 1;
    return dip_core(sorted_one_based_tail.data(), n, ws, lo, hi) / (2.0 * static_cast<double>(n));
}

struct NullKey {
    std::size_t n;
    std::size_t n_boot;
    std::uint64_t seed;
    auto operator<=>(const NullKey&) const = default;
};

std::mutex g_null_mutex;
std::map<NullKey, std::shared_ptr<const std::vector<double>>> g_null_cache;

std::shared_ptr<const std::vector<double>> null_distribution(std::size_t n, std::size_t n_boot, std::uint64_t seed) {
    const NullKey key{n, n_boot, seed};
    {
        std::lock_guard lock(g_null_mutex);
        if (auto it = g_null_cache.find(key); it != g_null_cache.end()) {
            return it->second;
        }
    }
    auto dips = std::make_shared<std::vector<double>>(n_boot);
    parallel_blocks(n_boot, 0, [&](std::size_t begin, std::size_t end) {
        DipWorkspace ws;
        std::vector<double> u(n + 1);
        for (std::size_t r = begin; r < end; ++r) {
            // Sorted uniforms as partial sums of exponential spacings; the dip is
            // scale invariant, so the final normalisation is skipped.
            std::mt19937_64 rng(seed + r);
            std::exponential_distribution<double> spacing(1.0);
            double s = 0.0;
            u[0] = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
                s += spacing(rng);
                u[i] = s;
            }
            (*dips)[r] = dip_of(u, ws);
        }
    });
    std::lock_guard lock(g_null_mutex);
    auto [it, inserted] = g_null_cache.emplace(key, std::move(dips));
    return it->second;
}

} // namespace

DipStatistic dip_statistic_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n == 0) {
        throw InvalidArgument("dip of an empty sample");
    }
    std::vector<double> x(n + 1);
    x[0] = 0.0;
    std::copy(sorted.begin(), sorted.end(), x.begin() + 1);
    for (std::size_t i = 2; i <= n; ++i) {
        if (x[i] < x[i - 1]) {
            throw InvalidArgument("dip_statistic_sorted requires ascending input");
        }
    }
    DipWorkspace ws;
    std::size_t lo = 1;
    std::size_t hi = n;
    const double twice_n_dip = dip_core(x.data(), n, ws, lo, hi);
    return {twice_n_dip / (2.0 * static_cast<double>(n)), lo - 1, hi - 1};
}

DipResult dip_test(std::span<const double> sample, const DipTestConfig& config) {
    if (sample.size() < 4) {
        throw InvalidArgument("dip test needs at least 4 observations");
    }
    if (config.n_boot < 100) {
        throw InvalidArgument("dip test needs at least 100 bootstrap replicates");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("dip test sample contains non-finite values");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    const auto stat = dip_statistic_sorted(sorted);
    const auto null = null_distribution(sorted.size(), config.n_boot, config.seed);
    const auto exceed = std::count_if(null->begin(), null->end(), [&](double d) { return d > stat.dip; });

    DipResult out;
    out.statistic = stat.dip;
    out.p_value = static_cast<double>(exceed) / static_cast<double>(config.n_boot);
    out.n_boot = config.n_boot;
    out.sample_size = sorted.size();
    out.modal_low = sorted[stat.modal_low];
    out.modal_high = sorted[stat.modal_high];
    return out;
}

} // namespace distsel
