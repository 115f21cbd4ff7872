#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include <gemkit/classify.hpp>
#include <gemkit/spectral.hpp>
#include <gemkit/stats.hpp>
#include <gemkit/synth.hpp>

// Independent reference implementations used only to cross-check the library.
// These deliberately use different algorithms (direct sums in long double,
// explicit design matrices, exhaustive search) from the production code.

namespace oracles {

// Direct-sum DFT magnitudes in long double.
inline std::vector<double> naive_dft_mag(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> out(n / 2 + 1);
    const long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        long double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            long double ph = two_pi * (long double)(k * t) / (long double)n;
            re += (long double)x[t] * std::cos(ph);
            im -= (long double)x[t] * std::sin(ph);
        }
        out[k] = double(std::sqrt(re * re + im * im));
    }
    return out;
}

// LPC model whose prediction polynomial has exactly the given pole pairs.
inline gemkit::spectral::LpcModel model_from_poles(
    const std::vector<gemkit::spectral::Pole>& poles, double fs) {
    std::vector<std::complex<double>> coef{1.0};  // A(z) in powers of z^-1
    for (const auto& p : poles) {
        const double r = std::exp(-M_PI * p.bandwidth / fs);
        const double th = 2.0 * M_PI * p.frequency / fs;
        const std::complex<double> z(r * std::cos(th), r * std::sin(th));
        for (const std::complex<double> root : {z, std::conj(z)}) {
            std::vector<std::complex<double>> next(coef.size() + 1, 0.0);
            for (std::size_t i = 0; i < coef.size(); ++i) {
                next[i] += coef[i];
                next[i + 1] -= coef[i] * root;  // multiply by (1 - root z^-1)
            }
            coef = std::move(next);
        }
    }
    gemkit::spectral::LpcModel m;
    m.order = int(coef.size()) - 1;
    m.gain = 1.0;
    for (std::size_t i = 1; i < coef.size(); ++i)
        m.coefficients.push_back(-coef[i].real());  // A(z) = 1 - sum a_k z^-k
    return m;
}

// Deterministic in-place Fisher-Yates using our own uniform deviates
// (std::shuffle's deviate sequence is implementation-defined).
template <class T>
inline void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        auto j = std::size_t(gemkit::synth::uniform01(rng) * double(i));
        if (j >= i) j = i - 1;
        std::swap(v[i - 1], v[j]);
    }
}

// Monte-Carlo permutation p for Spearman (two-sided, |r| >= |r_obs|).
inline double mc_spearman_p(std::span<const double> x, std::span<const double> y,
                            std::size_t trials, std::uint64_t seed) {
    auto rx = gemkit::stats::ranks(x);
    auto ry = gemkit::stats::ranks(y);
    const double observed = std::abs(gemkit::stats::detail::product_moment(rx, ry));
    std::mt19937_64 rng(seed);
    std::vector<double> perm = ry;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        shuffle(perm, rng);
        if (std::abs(gemkit::stats::detail::product_moment(rx, perm)) >= observed - 1e-12)
            ++hits;
    }
    return double(hits) / double(trials);
}

// Exhaustive minimal threshold error over every cut between sorted values
// (plus cuts below and above all data); rule: x > t -> geminate.
inline double brute_force_min_error_percent(std::span<const double> xs,
                                            std::span<const double> xg) {
    std::vector<double> vals(xs.begin(), xs.end());
    vals.insert(vals.end(), xg.begin(), xg.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<double> cuts{vals.front() - 1.0, vals.back() + 1.0};
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        cuts.push_back(0.5 * (vals[i] + vals[i + 1]));
    // sample values themselves are also valid cuts (x > t semantics)
    cuts.insert(cuts.end(), vals.begin(), vals.end());
    double best = 1e300;
    for (double t : cuts)
        best = std::min(best, gemkit::classify::threshold_error_percent(xs, xg, t));
    return best;
}

// Main-effect sums of squares via explicit OLS design matrices: SS(effect) =
// SSE(model without effect) - SSE(full main-effects model). For balanced
// designs this matches the mean-decomposition ANOVA.
inline std::vector<double> ols_main_effect_ss(std::span<const double> y,
                                              const std::vector<std::vector<int>>& factors,
                                              const std::vector<int>& levels) {
    const std::size_t n = y.size();
    auto design = [&](const std::vector<int>& keep) {
        int cols = 1;
        for (int fi : keep) cols += levels[std::size_t(fi)] - 1;
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(Eigen::Index(n), cols);
        for (std::size_t r = 0; r < n; ++r) {
            X(Eigen::Index(r), 0) = 1.0;
            int c = 1;
            for (int fi : keep) {
                int lv = factors[std::size_t(fi)][r];
                if (lv > 0) X(Eigen::Index(r), c + lv - 1) = 1.0;
                c += levels[std::size_t(fi)] - 1;
            }
        }
        return X;
    };
    Eigen::VectorXd yv = Eigen::VectorXd::Zero(Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) yv(Eigen::Index(i)) = y[i];
    auto sse = [&](const Eigen::MatrixXd& X) {
        Eigen::VectorXd beta = X.colPivHouseholderQr().solve(yv);
        return (yv - X * beta).squaredNorm();
    };
    std::vector<int> all(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) all[i] = int(i);
    const double sse_full = sse(design(all));
    std::vector<double> out;
    for (std::size_t drop = 0; drop < factors.size(); ++drop) {
        std::vector<int> keep;
        for (int fi : all)
            if (fi != int(drop)) keep.push_back(fi);
        out.push_back(sse(design(keep)) - sse_full);
    }
    return out;
}

}  // namespace oracles
