#include "distsel/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "distsel/error.hpp"
#include "distsel/parallel.hpp"

namespace distsel {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

double log_normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

} // namespace

GmmModel::GmmModel(std::vector<double> weights, std::vector<double> means, std::vector<double> sds,
                   double log_likelihood, std::size_t fitted_on, double weight_tol)
    : log_likelihood_(log_likelihood), fitted_on_(fitted_on) {
    const std::size_t m = weights.size();
    if (m == 0) {
        throw InvalidArgument("mixture needs at least one component");
    }
    if (means.size() != m || sds.size() != m) {
        throw InvalidArgument("weights, means and sds must have equal length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw InvalidArgument("mixture weights must be finite and nonnegative");
        }
        if (!std::isfinite(means[i])) {
            throw InvalidArgument("mixture means must be finite");
        }
        if (!std::isfinite(sds[i]) || !(sds[i] > 0.0)) {
            throw InvalidArgument("mixture sds must be positive");
        }
        total += weights[i];
    }
    if (std::abs(total - 1.0) > weight_tol) {
        throw InvalidArgument("mixture weights sum to " + std::to_string(total) + ", expected 1");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
    for (std::size_t idx : order) {
        weights_.push_back(weights[idx] / total);
        means_.push_back(means[idx]);
        sds_.push_back(sds[idx]);
    }
}

double normal_pdf(double x, double mean, double sd) { return std::exp(log_normal_pdf(x, mean, sd)); }

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double gmm_pdf(const GmmModel& model, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.components(); ++i) {
        s += model.weights()[i] * normal_pdf(x, model.means()[i], model.sds()[i]);
    }
    return s;
}

double gmm_cdf(const GmmModel& model, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < model.components(); ++i) {
        s += model.weights()[i] * normal_cdf(x, model.means()[i], model.sds()[i]);
    }
    return std::clamp(s, 0.0, 1.0);
}

namespace {

// log(sum_i w_i N(x | m_i, s_i)) and the per-component log terms.
double log_mixture_terms(const GmmModel& model, double x, std::vector<double>& terms) {
    const std::size_t m = model.components();
    terms.resize(m);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        const double w = model.weights()[i];
        terms[i] = w > 0.0 ? std::log(w) + log_normal_pdf(x, model.means()[i], model.sds()[i])
                           : -std::numeric_limits<double>::infinity();
        top = std::max(top, terms[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        s += std::exp(terms[i] - top);
    }
    return top + std::log(s);
}

} // namespace

double gmm_log_likelihood(const GmmModel& model, std::span<const double> data) {
    std::vector<double> terms;
    double total = 0.0;
    for (double x : data) {
        total += log_mixture_terms(model, x, terms);
    }
    return total;
}

std::vector<double> posterior(const GmmModel& model, double x) {
    std::vector<double> terms;
    const double log_total = log_mixture_terms(model, x, terms);
    std::vector<double> out(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out[i] = std::exp(terms[i] - log_total);
    }
    return out;
}

double gmm_quantile(const GmmModel& model, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("quantile probability must be in (0, 1)");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t i = 0; i < model.components(); ++i) {
        lo = std::min(lo, model.means()[i] - 12.0 * model.sds()[i]);
        hi = std::max(hi, model.means()[i] + 12.0 * model.sds()[i]);
        scale = std::max(scale, model.sds()[i]);
    }
    while (gmm_cdf(model, lo) > p) {
        lo -= hi - lo;
    }
    while (gmm_cdf(model, hi) < p) {
        hi += hi - lo;
    }
    const double tol = 1e-9 * std::min(1.0, scale);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (gmm_cdf(model, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

struct Params {
    std::vector<double> w;
    std::vector<double> m;
    std::vector<double> s;
};

struct RunOutput {
    Params params;
    RestartSummary summary;
    std::vector<std::size_t> floored;
};

double sample_quantile(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size()) - 0.5;
    if (pos <= 0.0) {
        return sorted.front();
    }
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

RunOutput run_em(std::span<const double> data, Params p, const FitConfig& config, double sd_floor) {
    const std::size_t n = data.size();
    const std::size_t k = p.w.size();
    const double dn = static_cast<double>(n);
    RunOutput out;
    std::vector<double> log_w(k), log_s(k), inv_var(k), terms(k);
    std::vector<double> s0(k), s1(k), s2(k);

    double prev = -std::numeric_limits<double>::infinity();
    Params current = p;
    for (std::size_t it = 0; it < config.max_iter; ++it) {
        for (std::size_t i = 0; i < k; ++i) {
            log_w[i] = p.w[i] > 0.0 ? std::log(p.w[i]) : -std::numeric_limits<double>::infinity();
            log_s[i] = std::log(p.s[i]);
            inv_var[i] = 1.0 / (p.s[i] * p.s[i]);
        }
        std::fill(s0.begin(), s0.end(), 0.0);
        std::fill(s1.begin(), s1.end(), 0.0);
        std::fill(s2.begin(), s2.end(), 0.0);
        double loglik = 0.0;
        for (double x : data) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i) {
                const double d = x - p.m[i];
                terms[i] = log_w[i] - log_s[i] - 0.5 * d * d * inv_var[i];
                top = std::max(top, terms[i]);
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                terms[i] = std::exp(terms[i] - top);
                sum += terms[i];
            }
            loglik += top + std::log(sum);
            const double inv_sum = 1.0 / sum;
            for (std::size_t i = 0; i < k; ++i) {
                const double r = terms[i] * inv_sum;
                const double d = x - p.m[i];
                s0[i] += r;
                s1[i] += r * x;
                s2[i] += r * d * d;
            }
        }
        loglik -= dn * kLogSqrt2Pi;
        current = p;
        if (config.record_trace) {
            out.summary.trace.push_back(loglik);
        }
        out.summary.iterations = it + 1;
        out.summary.log_likelihood = loglik;
        if (std::abs(loglik - prev) / dn < config.tol) {
            out.summary.converged = true;
            break;
        }
        prev = loglik;

        // M step; the variance is accumulated around the previous mean for stability.
        Params next = p;
        for (std::size_t i = 0; i < k; ++i) {
            next.w[i] = s0[i] / dn;
            if (s0[i] > 0.0) {
                next.m[i] = s1[i] / s0[i];
                const double shift = next.m[i] - p.m[i];
                const double var = std::max(0.0, s2[i] / s0[i] - shift * shift);
                next.s[i] = std::sqrt(var);
            }
            if (!(next.s[i] >= sd_floor)) {
                next.s[i] = sd_floor;
                if (std::find(out.floored.begin(), out.floored.end(), i) == out.floored.end()) {
                    out.floored.push_back(i);
                }
            }
        }
        p = std::move(next);
    }
    out.params = std::move(current);
    return out;
}

} // namespace

FitResult fit_gmm(std::span<const double> data, std::size_t components, const FitConfig& config) {
    if (components < 1) {
        throw InvalidArgument("number of mixture components must be at least 1");
    }
    if (data.size() < 10 * components) {
        throw InvalidArgument("need at least 10 observations per mixture component");
    }
    if (config.restarts < 1 || config.max_iter < 1) {
        throw InvalidArgument("restarts and max_iter must be positive");
    }
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("data contains non-finite values");
        }
    }
    const double range = sorted.back() - sorted.front();
    if (!(range > 0.0)) {
        throw InvalidArgument("cannot fit a mixture to a constant sample");
    }
    const double dn = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / dn;
    double ss = 0.0;
    for (double v : sorted) {
        ss += (v - mean) * (v - mean);
    }
    const double sample_sd = std::sqrt(ss / dn);
    const double sd_floor = 1e-4 * range;
    const auto m = static_cast<double>(components);

    Params base;
    for (std::size_t i = 0; i < components; ++i) {
        base.w.push_back(1.0 / m);
        base.m.push_back(sample_quantile(sorted, (static_cast<double>(i) + 0.5) / m));
        base.s.push_back(std::max(sample_sd / m, sd_floor));
    }

    std::vector<RunOutput> runs(config.restarts);
    parallel_blocks(config.restarts, 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Params start = base;
            if (r > 0) {
                std::mt19937_64 rng(config.seed + r);
                std::normal_distribution<double> z(0.0, 1.0);
                for (std::size_t i = 0; i < components; ++i) {
                    start.m[i] += 0.5 * z(rng) * sample_sd / m;
                    start.s[i] = std::max(start.s[i] * std::exp(0.3 * z(rng)), sd_floor);
                }
            }
            runs[r] = run_em(data, std::move(start), config, sd_floor);
        }
    });

    FitResult result;
    result.sd_floor = sd_floor;
    // Runs that end within the convergence tolerance of the top log-likelihood
    // reached the same optimum; the earliest of them is kept, so the choice
    // does not hinge on rounding noise.
    double top = runs[0].summary.log_likelihood;
    for (const auto& run : runs) {
        top = std::max(top, run.summary.log_likelihood);
    }
    std::size_t best = 0;
    while (runs[best].summary.log_likelihood < top - config.tol * dn) {
        ++best;
    }
    for (auto& run : runs) {
        result.restarts.push_back(run.summary);
    }
    result.best_restart = best;
    auto& winner = runs[best];
    result.floored_components = winner.floored;

    // Components are sorted by mean inside GmmModel; map flag indices accordingly.
    std::vector<std::size_t> order(components);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return winner.params.m[a] < winner.params.m[b]; });
    std::vector<std::size_t> rank(components);
    for (std::size_t i = 0; i < components; ++i) {
        rank[order[i]] = i;
    }
    for (auto& idx : result.floored_components) {
        idx = rank[idx];
    }
    std::sort(result.floored_components.begin(), result.floored_components.end());

    double total = 0.0;
    for (double w : winner.params.w) {
        total += w;
    }
    for (auto& w : winner.params.w) {
        w /= total;
    }
    result.model = GmmModel(winner.params.w, winner.params.m, winner.params.s, winner.summary.log_likelihood,
                            data.size(), 1e-6);
    for (std::size_t i = 0; i < components; ++i) {
        if (result.model.weights()[i] < 1.0 / (10.0 * dn)) {
            result.weak_components.push_back(i);
        }
    }
    if (!result.floored_components.empty()) {
        result.warnings.push_back("component collapse: sd floor " + std::to_string(sd_floor) + " applied");
    }
    if (!result.weak_components.empty()) {
        result.warnings.push_back("more components than the data supports (weight below 1/(10 n))");
    }
    if (!winner.summary.converged) {
        result.warnings.push_back("EM did not converge within max_iter");
    }
    return result;
}

BayesBoundaries bayes_boundaries(const GmmModel& model) {
    if (model.components() < 2) {
        throw InvalidArgument("Bayes boundaries need at least two components");
    }
    BayesBoundaries out;
    constexpr int kGrid = 1024;
    for (std::size_t i = 0; i + 1 < model.components(); ++i) {
        const double w1 = model.weights()[i];
        const double w2 = model.weights()[i + 1];
        const double m1 = model.means()[i];
        const double m2 = model.means()[i + 1];
        const double sd1 = model.sds()[i];
        const double sd2 = model.sds()[i + 1];
        // Positive where component i dominates component i+1.
        const auto log_ratio = [&](double x) {
            return (std::log(w1) + log_normal_pdf(x, m1, sd1)) - (std::log(w2) + log_normal_pdf(x, m2, sd2));
        };
        if (!(m2 > m1) || w1 <= 0.0 || w2 <= 0.0) {
            out.missing_pairs.push_back(i);
            continue;
        }
        std::optional<double> root;
        double prev_x = m1;
        double prev_f = log_ratio(m1);
        if (prev_f > 0.0) {
            for (int g = 1; g <= kGrid; ++g) {
                const double x = g == kGrid ? m2 : m1 + (m2 - m1) * static_cast<double>(g) / kGrid;
                const double f = log_ratio(x);
                if (f == 0.0) {
                    root = x;
                    break;
                }
                if (f < 0.0) {
                    double lo = prev_x;
                    double hi = x;
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid == lo || mid == hi) {
                            break;
                        }
                        const double fm = log_ratio(mid);
                        if (fm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        (fm > 0.0 ? lo : hi) = mid;
                    }
                    root = 0.5 * (lo + hi);
                    break;
                }
                prev_x = x;
                prev_f = f;
            }
        }
        if (!root) {
            out.missing_pairs.push_back(i);
            continue;
        }
        const double a = std::log(w1) + log_normal_pdf(*root, m1, sd1);
        const double b = std::log(w2) + log_normal_pdf(*root, m2, sd2);
        const double top = std::max(a, b);
        const double pa = std::exp(a - top) / (std::exp(a - top) + std::exp(b - top));
        out.boundaries.push_back(*root);
        out.posterior_at_boundary.push_back(pa);
        out.left_component.push_back(i);
    }
    return out;
}

GofResult chi_square_gof(const GmmModel& model, std::span<const double> data, std::size_t initial_bins) {
    if (data.size() < 50) {
        throw InvalidArgument("chi-square test needs at least 50 observations");
    }
    const auto [min_it, max_it] = std::minmax_element(data.begin(), data.end());
    const double lo = *min_it;
    const double hi = *max_it;
    if (!(hi > lo)) {
        throw InvalidArgument("chi-square test needs a non-constant sample");
    }
    const std::size_t k = initial_bins ? initial_bins : 10 * model.components();
    const double width = (hi - lo) / static_cast<double>(k);
    std::vector<double> observed(k, 0.0);
    for (double x : data) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        observed[std::min(b, k - 1)] += 1.0;
    }
    const double n = static_cast<double>(data.size());
    // Outer bins extend to +-infinity so the expected counts sum to n.
    std::vector<double> expected(k);
    double prev_cdf = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
        const double cdf = b + 1 == k ? 1.0 : gmm_cdf(model, lo + width * static_cast<double>(b + 1));
        expected[b] = n * (cdf - prev_cdf);
        prev_cdf = cdf;
    }

    GofResult out;
    std::vector<double> edges{lo};
    double acc_o = 0.0;
    double acc_e = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
        acc_o += observed[b];
        acc_e += expected[b];
        if (acc_e >= 5.0) {
            out.observed.push_back(acc_o);
            out.expected.push_back(acc_e);
            edges.push_back(b + 1 == k ? hi : lo + width * static_cast<double>(b + 1));
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (out.expected.empty()) {
            out.observed.push_back(acc_o);
            out.expected.push_back(acc_e);
            edges.push_back(hi);
        } else {
            out.observed.back() += acc_o;
            out.expected.back() += acc_e;
            edges.back() = hi;
        }
    }
    out.bins = out.expected.size();
    if (out.bins < 2) {
        throw InvalidArgument("fewer than 2 bins remain after merging; sample too small for the model");
    }
    out.bin_edges = std::move(edges);
    for (std::size_t b = 0; b < out.bins; ++b) {
        const double d = out.observed[b] - out.expected[b];
        out.chi2_statistic += d * d / out.expected[b];
    }
    const long dof = static_cast<long>(out.bins) - 3 * static_cast<long>(model.components());
    out.dof = static_cast<std::size_t>(std::max(1L, dof));
    out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.chi2_statistic);
    return out;
}

QqData qq_data(const GmmModel& model, std::span<const double> data, std::size_t points) {
    if (points < 10) {
        throw InvalidArgument("QQ data needs at least 10 points");
    }
    if (data.empty()) {
        throw InvalidArgument("QQ data needs a non-empty sample");
    }
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    QqData out;
    for (std::size_t i = 1; i <= points; ++i) {
        const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(points);
        const double e = sample_quantile(sorted, p);
        const double q = gmm_quantile(model, p);
        out.probabilities.push_back(p);
        out.empirical.push_back(e);
        out.model.push_back(q);
        out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(e - q));
    }
    return out;
}

ModeSelection select_modes(std::span<const double> data, std::size_t max_components, const FitConfig& config) {
    if (max_components < 1) {
        throw InvalidArgument("max_components must be at least 1");
    }
    ModeSelection out;
    const double log_n = std::log(static_cast<double>(data.size()));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= max_components; ++m) {
        const auto fit = fit_gmm(data, m, config);
        const double ll = fit.model.log_likelihood();
        const double bic = -2.0 * ll + (3.0 * static_cast<double>(m) - 1.0) * log_n;
        out.components.push_back(m);
        out.log_likelihood.push_back(ll);
        out.bic.push_back(bic);
        if (bic < best) {
            best = bic;
            out.suggested = m;
        }
    }
    return out;
}

} // namespace distsel
