#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace distsel {

// One-dimensional Gaussian mixture. Components are kept sorted by mean.
class GmmModel {
public:
    GmmModel() = default;
    // Validates (weights sum to 1 within weight_tol, sds > 0, all finite),
    // renormalises the weights exactly and sorts the components by mean.
    GmmModel(std::vector<double> weights, std::vector<double> means, std::vector<double> sds,
             double log_likelihood = 0.0, std::size_t fitted_on = 0, double weight_tol = 1e-9);

    std::size_t components() const noexcept { return weights_.size(); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& sds() const noexcept { return sds_; }
    double log_likelihood() const noexcept { return log_likelihood_; }
    std::size_t fitted_on() const noexcept { return fitted_on_; }

    bool operator==(const GmmModel&) const = default;

private:
    std::vector<double> weights_;
    std::vector<double> means_;
    std::vector<double> sds_;
    double log_likelihood_ = 0.0;
    std::size_t fitted_on_ = 0;
};

struct FitConfig {
    std::size_t restarts = 5;
    std::size_t max_iter = 1000;
    // Stop when the change in mean per-observation log-likelihood falls below tol.
    double tol = 1e-8;
    std::uint64_t seed = 0;
    bool record_trace = false;  // keep the per-iteration log-likelihood of every run
};

struct RestartSummary {
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // filled when FitConfig::record_trace is set
};

struct FitResult {
    GmmModel model;
    std::size_t best_restart = 0;
    std::vector<RestartSummary> restarts;
    std::vector<std::size_t> floored_components;  // sd floor was applied (component collapse)
    std::vector<std::size_t> weak_components;     // weight below 1 / (10 n)
    double sd_floor = 0.0;
    std::vector<std::string> warnings;
};

FitResult fit_gmm(std::span<const double> data, std::size_t components, const FitConfig& config = {});

double normal_pdf(double x, double mean, double sd);
double normal_cdf(double x, double mean, double sd);

double gmm_pdf(const GmmModel& model, double x);
double gmm_cdf(const GmmModel& model, double x);
double gmm_log_likelihood(const GmmModel& model, std::span<const double> data);
// Smallest x with gmm_cdf(x) >= p, by bisection to 1e-9 (absolute, scaled to the model).
double gmm_quantile(const GmmModel& model, double p);

// p(c_i | x), computed in log space so it never produces NaN.
std::vector<double> posterior(const GmmModel& model, double x);

struct BayesBoundaries {
    std::vector<double> boundaries;            // ascending
    std::vector<double> posterior_at_boundary;  // p(c_i | b) restricted to the adjacent pair
    std::vector<std::size_t> left_component;    // boundary k separates left_component[k] and +1
    std::vector<std::size_t> missing_pairs;     // adjacent pairs (i, i+1) without a dominance switch

    std::optional<double> last() const {
        if (boundaries.empty()) {
            return std::nullopt;
        }
        return boundaries.back();
    }
};

BayesBoundaries bayes_boundaries(const GmmModel& model);

struct GofResult {
    double chi2_statistic = 0.0;
    std::size_t dof = 1;
    double p_value = 1.0;
    std::size_t bins = 0;
    std::vector<double> bin_edges;  // bins + 1 edges; outer edges are the data range
    std::vector<double> observed;
    std::vector<double> expected;
};

// Equal-width binning over [min, max] (10 * M bins unless given), adjacent bins
// merged until every expected count is at least 5.
GofResult chi_square_gof(const GmmModel& model, std::span<const double> data, std::size_t initial_bins = 0);

struct QqData {
    std::vector<double> probabilities;
    std::vector<double> empirical;
    std::vector<double> model;
    double max_abs_deviation = 0.0;
};

QqData qq_data(const GmmModel& model, std::span<const double> data, std::size_t points = 100);

struct ModeSelection {
    std::vector<std::size_t> components;
    std::vector<double> bic;
    std::vector<double> log_likelihood;
    std::size_t suggested = 1;
};

// Fits M = 1..max_components and ranks them by BIC; the caller decides.
ModeSelection select_modes(std::span<const double> data, std::size_t max_components = 5,
                           const FitConfig& config = {});

} // namespace distsel
