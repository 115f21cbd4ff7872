#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "segmentation.hpp"

// Frequency-domain measurement: pre-emphasis, Hamming window, DFT magnitude
// spectra, autocorrelation-method LPC, formants from LPC pole angles, and an
// NCCF pitch estimator with parabolic peak interpolation.

namespace gemkit::spectral {

inline std::vector<double> preemphasize(std::span<const double> x, double alpha = 0.95) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("pre-emphasis alpha must be in [0,1)");
    std::vector<double> y(x.size());
    if (x.empty()) return y;
    y[0] = x[0];
    for (std::size_t n = 1; n < x.size(); ++n) y[n] = x[n] - alpha * x[n - 1];
    return y;
}

inline std::vector<double> hamming_weights(std::size_t n) {
    if (n < 2) throw WrongLength("window length must be >= 2");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * double(i) / double(n - 1));
    return w;
}

// Elementwise Hamming product. required_len guards the canonical 256-sample
// use; pass 0 to window arbitrary lengths (tests).
inline std::vector<double> hamming_window(std::span<const double> frame,
                                          std::size_t required_len = seg::kFrameLen) {
    if (required_len != 0 && frame.size() != required_len)
        throw WrongLength("expected frame of " + std::to_string(required_len) +
                          " samples, got " + std::to_string(frame.size()));
    auto w = hamming_weights(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) w[i] *= frame[i];
    return w;
}

// Direct-sum DFT magnitudes |X[k]| for k = 0..N/2; bin k maps to k*fs/N Hz.
inline std::vector<double> dft_magnitude(std::span<const double> frame) {
    const std::size_t n = frame.size();
    std::vector<double> mag(n / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) {
        double re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            double ph = -2.0 * M_PI * double(k) * double(t) / double(n);
            re += frame[t] * std::cos(ph);
            im += frame[t] * std::sin(ph);
        }
        mag[k] = std::hypot(re, im);
    }
    return mag;
}

// Parseval sum: time-domain energy reconstructed from the magnitude spectrum
// of a length-n real frame (interior bins count twice).
inline double parseval_energy(std::span<const double> mag, std::size_t n) {
    double s = 0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
        bool interior = k != 0 && !(n % 2 == 0 && k == n / 2);
        s += (interior ? 2.0 : 1.0) * mag[k] * mag[k];
    }
    return s / double(n);
}

struct LpcModel {
    int order = 0;
    std::vector<double> coefficients;  // a_1..a_p, prediction x[n] ~ sum a_j x[n-j]
    double gain = 0;                   // residual energy after the recursion
};

// Autocorrelation method with Levinson-Durbin. The frame is used as given
// (callers pre-emphasize and window first).
inline LpcModel lpc_fit(std::span<const double> frame, int order) {
    if (order < 0 || std::size_t(order) >= frame.size())
        throw Error("LPC order must satisfy 0 <= order < frame length");
    std::vector<double> r(std::size_t(order) + 1, 0.0);
    for (int lag = 0; lag <= order; ++lag)
        for (std::size_t t = std::size_t(lag); t < frame.size(); ++t)
            r[std::size_t(lag)] += frame[t] * frame[t - std::size_t(lag)];
    if (r[0] <= 0.0) throw DegenerateFrame("silent frame (zero autocorrelation at lag 0)");

    LpcModel m;
    m.order = order;
    m.coefficients.assign(std::size_t(order), 0.0);
    double e = r[0];
    for (int i = 1; i <= order; ++i) {
        double acc = r[std::size_t(i)];
        for (int j = 1; j < i; ++j) acc -= m.coefficients[std::size_t(j - 1)] * r[std::size_t(i - j)];
        double k = e > 0.0 ? acc / e : 0.0;
        std::vector<double> prev(m.coefficients.begin(), m.coefficients.begin() + (i - 1));
        m.coefficients[std::size_t(i - 1)] = k;
        for (int j = 1; j < i; ++j)
            m.coefficients[std::size_t(j - 1)] = prev[std::size_t(j - 1)] - k * prev[std::size_t(i - 1 - j)];
        e *= (1.0 - k * k);
    }
    m.gain = e;
    return m;
}

struct Pole {
    double frequency = 0;  // Hz
    double bandwidth = 0;  // Hz
};

// All complex-conjugate pole pairs of 1 - sum a_k z^-k (positive-imaginary
// roots), as (frequency, bandwidth) pairs sorted by frequency — the raw list,
// unfiltered, for auditing.
inline std::vector<Pole> lpc_poles(const LpcModel& model, double sample_rate) {
    const int p = model.order;
    if (p == 0) return {};
    // Companion matrix of z^p - a_1 z^(p-1) - ... - a_p.
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
    for (int i = 1; i < p; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < p; ++i) c(i, p - 1) = model.coefficients[std::size_t(p - 1 - i)];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(c, /*computeEigenvectors=*/false);
    std::vector<Pole> out;
    for (int i = 0; i < p; ++i) {
        std::complex<double> z = solver.eigenvalues()[i];
        if (z.imag() <= 0.0) continue;
        double mag = std::abs(z);
        if (mag <= 0.0) continue;
        double f = std::atan2(z.imag(), z.real()) * sample_rate / (2.0 * M_PI);
        double bw = -std::log(mag) * sample_rate / M_PI;
        out.push_back({f, bw});
    }
    std::sort(out.begin(), out.end(),
              [](const Pole& a, const Pole& b) { return a.frequency < b.frequency; });
    return out;
}

struct FormantOptions {
    double max_bandwidth = 400.0;   // Hz
    double min_frequency = 90.0;    // Hz
    double max_frequency_frac = 0.95;  // of Nyquist
};

inline std::vector<Pole> formant_candidates(const LpcModel& model, double sample_rate,
                                            const FormantOptions& opt = {}) {
    std::vector<Pole> out;
    const double fmax = opt.max_frequency_frac * sample_rate / 2.0;
    for (const Pole& p : lpc_poles(model, sample_rate))
        if (p.bandwidth <= opt.max_bandwidth && p.frequency >= opt.min_frequency &&
            p.frequency <= fmax)
            out.push_back(p);
    return out;  // already frequency-sorted
}

// Strict F1..F3; callers that tolerate missing formants use
// formant_candidates directly and record absent ones as "not measured".
inline std::array<double, 3> estimate_formants(const LpcModel& model, double sample_rate,
                                               const FormantOptions& opt = {}) {
    auto cand = formant_candidates(model, sample_rate, opt);
    if (cand.size() < 3) throw InsufficientFormants(int(cand.size()));
    return {cand[0].frequency, cand[1].frequency, cand[2].frequency};
}

// --- fundamental frequency ---

struct F0Options {
    double lo = 60.0;   // Hz, search band
    double hi = 400.0;
    double voicing_threshold = 0.3;
    double sub_ratio = 0.95;  // acceptance ratio for sub-multiple lags
};

struct F0Result {
    std::optional<double> f0;  // nullopt = unvoiced
    double nccf = 0.0;         // refined peak value at the selected lag
};

// Normalized cross-correlation pitch: fixed correlation window of n - max_lag
// samples, global NCCF peak, then a walk over integer divisors of the peak
// lag (smallest candidate lag first) to undo period-multiple locking, with
// parabolic interpolation of both the lag and the peak value.
inline F0Result estimate_f0_detail(std::span<const double> region, double sample_rate,
                                   const F0Options& opt = {}) {
    const std::int64_t n = std::int64_t(region.size());
    const std::int64_t tmin = std::max<std::int64_t>(2, std::int64_t(std::floor(sample_rate / opt.hi)));
    const std::int64_t tmax = std::int64_t(std::ceil(sample_rate / opt.lo));
    if (tmax * 2 > n)
        throw RegionTooShort("need at least two periods at " + std::to_string(opt.lo) +
                             " Hz: " + std::to_string(tmax * 2) + " samples, got " +
                             std::to_string(n));
    if (tmin >= tmax) throw Error("empty F0 search band");

    const std::int64_t m = n - tmax;
    double e0 = 0;
    for (std::int64_t t = 0; t < m; ++t) e0 += region[std::size_t(t)] * region[std::size_t(t)];
    std::vector<double> vals(std::size_t(tmax) + 1, 0.0);
    for (std::int64_t t = tmin; t <= tmax; ++t) {
        double et = 0, c = 0;
        for (std::int64_t i = 0; i < m; ++i) {
            double b = region[std::size_t(t + i)];
            et += b * b;
            c += region[std::size_t(i)] * b;
        }
        vals[std::size_t(t)] = (e0 > 0 && et > 0) ? c / std::sqrt(e0 * et) : 0.0;
    }

    // Parabolic refinement around an integer lag: (fractional lag, refined value).
    auto refine = [&](std::int64_t t) -> std::pair<double, double> {
        if (t - 1 < tmin || t + 1 > tmax) return {double(t), vals[std::size_t(t)]};
        double ym = vals[std::size_t(t - 1)], y0 = vals[std::size_t(t)], yp = vals[std::size_t(t + 1)];
        double den = ym - 2.0 * y0 + yp;
        if (den == 0.0) return {double(t), y0};
        double d = 0.5 * (ym - yp) / den;
        if (std::abs(d) > 1.0) return {double(t), y0};
        return {double(t) + d, y0 - 0.25 * (ym - yp) * d};
    };

    std::int64_t t_best = tmin;
    for (std::int64_t t = tmin; t <= tmax; ++t)
        if (vals[std::size_t(t)] > vals[std::size_t(t_best)]) t_best = t;
    const double vmax_ref = refine(t_best).second;

    std::int64_t sel = t_best;
    for (std::int64_t k = t_best / tmin; k >= 2; --k) {  // smallest sub-lag first
        std::int64_t tk = std::int64_t(std::llround(double(t_best) / double(k)));
        if (tk < tmin || tk == t_best) continue;
        std::int64_t lo = std::max(tmin, tk - 2), hi = std::min(tmax, tk + 2);
        std::int64_t cand = lo;
        for (std::int64_t q = lo; q <= hi; ++q)
            if (vals[std::size_t(q)] > vals[std::size_t(cand)]) cand = q;
        if (refine(cand).second >= opt.sub_ratio * vmax_ref) {
            sel = cand;
            break;
        }
    }

    auto [lag, value] = refine(sel);
    F0Result res;
    res.nccf = value;
    if (value >= opt.voicing_threshold) res.f0 = sample_rate / lag;
    return res;
}

inline std::optional<double> estimate_f0(std::span<const double> region, double sample_rate,
                                         const F0Options& opt = {}) {
    return estimate_f0_detail(region, sample_rate, opt).f0;
}

}  // namespace gemkit::spectral
