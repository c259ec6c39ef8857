#include "fusetree/weights.hpp"

#include <cmath>
#include <cstdlib>

#include "fusetree/errors.hpp"

namespace fusetree {

void WeightScheme::validate() const {
    if (kind == WeightKind::ExpAdaptive) {
        if (alpha <= 0) throw DataError("alpha must be > 0");
        if (gamma <= 0) throw DataError("gamma must be > 0");
    }
}

std::string WeightScheme::name() const {
    switch (kind) {
        case WeightKind::Default: return "default";
        case WeightKind::ExpAdaptive: return "adaptive";
        case WeightKind::CasAnova: return "casanova";
    }
    return "?";
}

WeightScheme WeightScheme::parse(const std::string& name, double alpha, double gamma) {
    WeightScheme s;
    if (name == "default") s.kind = WeightKind::Default;
    else if (name == "adaptive") s.kind = WeightKind::ExpAdaptive;
    else if (name == "casanova") s.kind = WeightKind::CasAnova;
    else throw UsageError("unknown weight scheme '" + name + "'");
    s.alpha = alpha;
    s.gamma = gamma;
    s.validate();
    return s;
}

double pairwise_weight(const WeightScheme& scheme,
                       std::int64_t n_k, double mean_k,
                       std::int64_t n_l, double mean_l,
                       std::int64_t n_total) {
    const double gap = std::abs(mean_k - mean_l);
    const double sizes = static_cast<double>(n_k) * static_cast<double>(n_l);
    switch (scheme.kind) {
        case WeightKind::Default:
            return sizes;
        case WeightKind::ExpAdaptive:
            return sizes * std::exp(-scheme.alpha *
                                    std::sqrt(static_cast<double>(n_total)) *
                                    std::pow(gap, scheme.gamma));
        case WeightKind::CasAnova:
            if (gap == 0.0)
                throw DataError("infinite CasAnova weight: equal group means must be pre-merged");
            return std::sqrt(static_cast<double>(n_k + n_l)) / gap;
    }
    return 0.0;
}

namespace {

void require_sorted(const std::vector<double>& means) {
    for (std::size_t i = 1; i < means.size(); ++i)
        if (!(means[i - 1] > means[i]))
            throw InternalError("initial_slopes: means must be strictly decreasing");
}

std::vector<double> slopes_default(const std::vector<std::int64_t>& sizes) {
    // slope_k = sum_{l<k} n_l - sum_{l>k} n_l  (w_{kl}/n_k = n_l)
    const std::size_t K = sizes.size();
    std::vector<double> slopes(K);
    std::int64_t total = 0;
    for (auto s : sizes) total += s;
    std::int64_t before = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const std::int64_t after = total - before - sizes[k];
        slopes[k] = static_cast<double>(before - after);
        before += sizes[k];
    }
    return slopes;
}

// Gap-shifted recurrences for ExpAdaptive gamma = 1: every exponential has a
// nonpositive argument, so nothing overflows regardless of alpha*sqrt(n)*range.
std::vector<double> slopes_exp_fast(const std::vector<std::int64_t>& sizes,
                                    const std::vector<double>& means,
                                    double alpha, std::int64_t n_total) {
    const std::size_t K = sizes.size();
    const double scale = alpha * std::sqrt(static_cast<double>(n_total));
    std::vector<double> left(K, 0.0), right(K, 0.0);
    for (std::size_t k = 1; k < K; ++k)
        left[k] = (left[k - 1] + static_cast<double>(sizes[k - 1])) *
                  std::exp(-scale * (means[k - 1] - means[k]));
    for (std::size_t k = K - 1; k-- > 0;)
        right[k] = (right[k + 1] + static_cast<double>(sizes[k + 1])) *
                   std::exp(-scale * (means[k] - means[k + 1]));
    std::vector<double> slopes(K);
    for (std::size_t k = 0; k < K; ++k) slopes[k] = left[k] - right[k];
    return slopes;
}

std::vector<double> slopes_direct(const WeightScheme& scheme,
                                  const std::vector<std::int64_t>& sizes,
                                  const std::vector<double>& means,
                                  std::int64_t n_total) {
    const std::size_t K = sizes.size();
    std::vector<double> slopes(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < K; ++l) {
            if (l == k) continue;
            const double w = pairwise_weight(scheme, sizes[k], means[k],
                                             sizes[l], means[l], n_total);
            acc += (l > k) ? -w : w;  // sign(mean_k - mean_l) is +1 for l > k
        }
        slopes[k] = acc / static_cast<double>(sizes[k]);
    }
    return slopes;
}

}  // namespace

std::vector<double> initial_slopes(const WeightScheme& scheme,
                                   const std::vector<std::int64_t>& sizes,
                                   const std::vector<double>& means,
                                   std::int64_t n_total) {
    if (sizes.size() != means.size())
        throw InternalError("initial_slopes: size/mean length mismatch");
    if (sizes.empty()) return {};
    require_sorted(means);
    if (scheme.kind == WeightKind::Default)
        return slopes_default(sizes);
    if (scheme.kind == WeightKind::ExpAdaptive && scheme.gamma == 1.0)
        return slopes_exp_fast(sizes, means, scheme.alpha, n_total);
    return slopes_direct(scheme, sizes, means, n_total);
}

}  // namespace fusetree
