#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

// Singleton/geminate classification: Gaussian fits, 1D/2D maximum-likelihood
// decisions, point-of-equal-probability thresholds, the exhaustive threshold
// sweep, and error curves.

namespace gemkit::classify {

struct Gaussian1D {
    double mean = 0;
    double variance = 0;
    double prior = 0.5;
};

struct Gaussian2D {
    std::array<double, 2> mean{};
    std::array<std::array<double, 2>, 2> cov{};
    double prior = 0.5;
};

inline Gaussian1D fit_gaussian(std::span<const double> xs, double prior = 0.5) {
    if (xs.size() < 2) throw DegenerateSample("1D Gaussian fit needs n >= 2");
    double m = 0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    double var = ss / double(xs.size() - 1);
    if (!(var > 0)) throw DegenerateSample("zero sample variance");
    return {m, var, prior};
}

inline Gaussian2D fit_gaussian2d(std::span<const std::array<double, 2>> xs, double prior = 0.5) {
    if (xs.size() < 3) throw DegenerateSample("2D Gaussian fit needs n >= 3");
    Gaussian2D g;
    g.prior = prior;
    for (const auto& x : xs) {
        g.mean[0] += x[0];
        g.mean[1] += x[1];
    }
    g.mean[0] /= double(xs.size());
    g.mean[1] /= double(xs.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& x : xs) {
        double dx = x[0] - g.mean[0], dy = x[1] - g.mean[1];
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    double denom = double(xs.size() - 1);
    g.cov = {{{sxx / denom, sxy / denom}, {sxy / denom, syy / denom}}};
    double det = g.cov[0][0] * g.cov[1][1] - g.cov[0][1] * g.cov[1][0];
    if (!(g.cov[0][0] > 0) || !(det > 0))
        throw DegenerateSample("singular 2D sample covariance");
    return g;
}

inline double log_density(double x, const Gaussian1D& g) {
    if (!(g.variance > 0)) throw DegenerateVariance("non-positive variance");
    double d = x - g.mean;
    return -0.5 * d * d / g.variance - 0.5 * std::log(2.0 * M_PI * g.variance);
}

inline double log_density(const std::array<double, 2>& x, const Gaussian2D& g) {
    double det = g.cov[0][0] * g.cov[1][1] - g.cov[0][1] * g.cov[1][0];
    if (!(det > 0) || !(g.cov[0][0] > 0)) throw DegenerateVariance("covariance not SPD");
    double dx = x[0] - g.mean[0], dy = x[1] - g.mean[1];
    // quadratic form with the explicit 2x2 inverse
    double q = (dx * (g.cov[1][1] * dx - g.cov[0][1] * dy) +
                dy * (g.cov[0][0] * dy - g.cov[0][1] * dx)) /
               det;
    return -0.5 * q - std::log(2.0 * M_PI) - 0.5 * std::log(det);
}

// MLC decision; ties go to singleton.
inline Form mlc_classify(double x, const Gaussian1D& singleton, const Gaussian1D& geminate) {
    double ls = log_density(x, singleton) + std::log(singleton.prior);
    double lg = log_density(x, geminate) + std::log(geminate.prior);
    return lg > ls ? Form::geminate : Form::singleton;
}

inline Form mlc_classify(const std::array<double, 2>& x, const Gaussian2D& singleton,
                         const Gaussian2D& geminate) {
    double ls = log_density(x, singleton) + std::log(singleton.prior);
    double lg = log_density(x, geminate) + std::log(geminate.prior);
    return lg > ls ? Form::geminate : Form::singleton;
}

enum class ThresholdMethod { pep, heuristic };

struct ThresholdResult {
    double threshold = 0;
    ThresholdMethod method = ThresholdMethod::pep;
    double error_percent = 0;     // resubstitution error at the threshold
    double interval_lo = 0;       // for heuristic: widest minimal-error interval
    double interval_hi = 0;       //   (±inf when unbounded on a side)
};

// Classify value > t as geminate; resubstitution error in percent.
inline double threshold_error_percent(std::span<const double> singleton,
                                      std::span<const double> geminate, double t) {
    std::size_t wrong = 0;
    for (double x : singleton) wrong += x > t;
    for (double x : geminate) wrong += x <= t;
    return 100.0 * double(wrong) / double(singleton.size() + geminate.size());
}

// Point of equal probability between two 1D Gaussians: the root of the
// prior-weighted log-density equality that lies between the means (smallest
// such root if the quadratic yields two).
inline double pep_point(const Gaussian1D& s, const Gaussian1D& g) {
    if (!(s.variance > 0) || !(g.variance > 0))
        throw DegenerateVariance("PEP needs positive variances");
    const double ms = s.mean, mg = g.mean;
    const double vs = s.variance, vg = g.variance;
    const double lo = std::min(ms, mg), hi = std::max(ms, mg);
    const double a = 1.0 / (2.0 * vg) - 1.0 / (2.0 * vs);
    const double b = ms / vs - mg / vg;
    const double c = mg * mg / (2.0 * vg) - ms * ms / (2.0 * vs) +
                     0.5 * std::log(vg / vs) + std::log(s.prior / g.prior);
    if (std::abs(a) < 1e-15) {
        if (std::abs(b) < 1e-300) throw NoInteriorRoot("densities never cross");
        double x = -c / b;
        if (x < lo || x > hi) throw NoInteriorRoot("crossing lies outside the means");
        return x;
    }
    double disc = b * b - 4.0 * a * c;
    if (disc < 0) throw NoInteriorRoot("densities have no real crossing");
    double sq = std::sqrt(disc);
    std::array<double, 2> roots{(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
    if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    for (double r : roots)
        if (lo <= r && r <= hi) return r;
    throw NoInteriorRoot("no density crossing between the class means");
}

inline ThresholdResult pep_threshold(const Gaussian1D& s, const Gaussian1D& g,
                                     std::span<const double> xs = {},
                                     std::span<const double> xg = {}) {
    ThresholdResult res;
    res.method = ThresholdMethod::pep;
    res.threshold = pep_point(s, g);
    res.interval_lo = res.interval_hi = res.threshold;
    if (!xs.empty() && !xg.empty())
        res.error_percent = threshold_error_percent(xs, xg, res.threshold);
    return res;
}

// Exhaustive sweep over all cuts: candidates are the midpoints of consecutive
// distinct values plus one cut below and above everything. Minimizes the
// resubstitution error; among minimizing intervals returns the widest
// (first on ties), reporting its midpoint — or the finite edge when the
// widest interval is unbounded.
inline ThresholdResult heuristic_threshold(std::span<const double> xs,
                                           std::span<const double> xg) {
    if (xs.empty() || xg.empty()) throw SingleClassGroup("both classes must be present");
    std::vector<double> vals;
    vals.reserve(xs.size() + xg.size());
    vals.insert(vals.end(), xs.begin(), xs.end());
    vals.insert(vals.end(), xg.begin(), xg.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    const std::size_t k = vals.size();

    // candidate i represents the open gap (vals[i-1], vals[i]); i = 0 is
    // (-inf, vals[0]) and i = k is (vals[k-1], +inf)
    std::vector<double> cands(k + 1);
    cands[0] = vals.front() - 1.0;
    for (std::size_t i = 1; i < k; ++i) cands[i] = (vals[i - 1] + vals[i]) / 2.0;
    cands[k] = vals.back() + 1.0;

    std::vector<std::size_t> errs(k + 1);
    std::size_t emin = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i <= k; ++i) {
        std::size_t wrong = 0;
        for (double x : xs) wrong += x > cands[i];
        for (double x : xg) wrong += x <= cands[i];
        errs[i] = wrong;
        emin = std::min(emin, wrong);
    }

    const double inf = std::numeric_limits<double>::infinity();
    double best_lo = 0, best_hi = 0, best_w = -1;
    std::size_t i = 0;
    while (i <= k) {
        if (errs[i] != emin) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 <= k && errs[j + 1] == emin) ++j;
        double lo = i > 0 ? vals[i - 1] : -inf;
        double hi = j < k ? vals[j] : inf;
        if (hi - lo > best_w) {
            best_w = hi - lo;
            best_lo = lo;
            best_hi = hi;
        }
        i = j + 1;
    }

    ThresholdResult res;
    res.method = ThresholdMethod::heuristic;
    res.interval_lo = best_lo;
    res.interval_hi = best_hi;
    if (std::isfinite(best_lo) && std::isfinite(best_hi))
        res.threshold = (best_lo + best_hi) / 2.0;
    else if (std::isfinite(best_hi))
        res.threshold = best_hi;
    else if (std::isfinite(best_lo))
        res.threshold = best_lo;
    else
        res.threshold = vals.front();  // degenerate single-value case
    res.error_percent = 100.0 * double(emin) / double(xs.size() + xg.size());
    return res;
}

enum class Protocol { resubstitution, leave_one_out };

// Covariance structure for the 2D decision rule: one full covariance per class
// (quadratic boundary, the default) or a single covariance pooled across both
// classes (linear boundary), available to probe sensitivity to that choice.
enum class CovarianceMode { full, pooled };

// Replace both models' covariances with their (n-1)-weighted average; means
// and priors are untouched.
inline std::pair<Gaussian2D, Gaussian2D> pool_covariance(Gaussian2D s, std::size_t ns,
                                                         Gaussian2D g, std::size_t ng) {
    if (ns < 2 || ng < 2) throw DegenerateSample("pooling needs n >= 2 per class");
    const double ws = double(ns - 1), wg = double(ng - 1);
    std::array<std::array<double, 2>, 2> cov{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            cov[i][j] = (ws * s.cov[i][j] + wg * g.cov[i][j]) / (ws + wg);
    double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if (!(cov[0][0] > 0) || !(det > 0))
        throw DegenerateSample("singular pooled covariance");
    s.cov = cov;
    g.cov = cov;
    return {s, g};
}

struct ClassificationReport {
    std::vector<std::string> features;
    Protocol protocol = Protocol::resubstitution;
    std::size_t singleton_as_singleton = 0, singleton_as_geminate = 0;
    std::size_t geminate_as_singleton = 0, geminate_as_geminate = 0;
    double error_percent = 0;
    std::size_t total() const {
        return singleton_as_singleton + singleton_as_geminate + geminate_as_singleton +
               geminate_as_geminate;
    }
};

namespace detail {

// Moment sums supporting O(1) leave-one-out refits.
struct Sums1D {
    double s1 = 0, s2 = 0;
    std::size_t n = 0;
    void add(double x) { s1 += x, s2 += x * x, ++n; }
    Gaussian1D fit_excluding(double x, bool exclude) const {
        double e1 = s1 - (exclude ? x : 0.0), e2 = s2 - (exclude ? x * x : 0.0);
        std::size_t en = n - (exclude ? 1 : 0);
        if (en < 2) throw DegenerateSample("1D Gaussian fit needs n >= 2");
        double m = e1 / double(en);
        double var = (e2 - double(en) * m * m) / double(en - 1);
        if (!(var > 0)) throw DegenerateSample("zero sample variance");
        return {m, var, 0.5};
    }
};

struct Sums2D {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::size_t n = 0;
    void add(const std::array<double, 2>& p) {
        sx += p[0], sy += p[1];
        sxx += p[0] * p[0], syy += p[1] * p[1], sxy += p[0] * p[1];
        ++n;
    }
    Gaussian2D fit_excluding(const std::array<double, 2>& p, bool exclude) const {
        double ex = sx, ey = sy, exx = sxx, eyy = syy, exy = sxy;
        std::size_t en = n;
        if (exclude) {
            ex -= p[0], ey -= p[1];
            exx -= p[0] * p[0], eyy -= p[1] * p[1], exy -= p[0] * p[1];
            --en;
        }
        if (en < 3) throw DegenerateSample("2D Gaussian fit needs n >= 3");
        Gaussian2D g;
        g.mean = {ex / double(en), ey / double(en)};
        double d = double(en - 1);
        g.cov = {{{(exx - double(en) * g.mean[0] * g.mean[0]) / d,
                   (exy - double(en) * g.mean[0] * g.mean[1]) / d},
                  {(exy - double(en) * g.mean[0] * g.mean[1]) / d,
                   (eyy - double(en) * g.mean[1] * g.mean[1]) / d}}};
        double det = g.cov[0][0] * g.cov[1][1] - g.cov[0][1] * g.cov[1][0];
        if (!(g.cov[0][0] > 0) || !(det > 0))
            throw DegenerateSample("singular 2D sample covariance");
        return g;
    }
};

}  // namespace detail

inline ClassificationReport error_rate(std::span<const double> xs, std::span<const double> xg,
                                       Protocol proto = Protocol::resubstitution) {
    if (xs.empty() || xg.empty()) throw SingleClassGroup("both classes must be present");
    detail::Sums1D ss, sg;
    for (double x : xs) ss.add(x);
    for (double x : xg) sg.add(x);
    const bool loo = proto == Protocol::leave_one_out;
    ClassificationReport rep;
    rep.protocol = proto;
    Gaussian1D fit_s = ss.fit_excluding(0, false), fit_g = sg.fit_excluding(0, false);
    for (double x : xs) {
        Form lab = mlc_classify(x, loo ? ss.fit_excluding(x, true) : fit_s, fit_g);
        (lab == Form::singleton ? rep.singleton_as_singleton : rep.singleton_as_geminate)++;
    }
    for (double x : xg) {
        Form lab = mlc_classify(x, fit_s, loo ? sg.fit_excluding(x, true) : fit_g);
        (lab == Form::geminate ? rep.geminate_as_geminate : rep.geminate_as_singleton)++;
    }
    rep.error_percent = 100.0 * double(rep.singleton_as_geminate + rep.geminate_as_singleton) /
                        double(rep.total());
    return rep;
}

inline ClassificationReport error_rate_2d(std::span<const std::array<double, 2>> xs,
                                          std::span<const std::array<double, 2>> xg,
                                          Protocol proto = Protocol::resubstitution,
                                          CovarianceMode mode = CovarianceMode::full) {
    if (xs.empty() || xg.empty()) throw SingleClassGroup("both classes must be present");
    detail::Sums2D ss, sg;
    for (const auto& x : xs) ss.add(x);
    for (const auto& x : xg) sg.add(x);
    const bool loo = proto == Protocol::leave_one_out;
    const bool pooled = mode == CovarianceMode::pooled;
    ClassificationReport rep;
    rep.protocol = proto;
    // Raw per-class fits; under pooling the decision models share one covariance,
    // re-pooled per point in leave-one-out so the held-out point touches neither
    // its class moments nor the pooled matrix.
    const Gaussian2D raw_s = ss.fit_excluding({}, false), raw_g = sg.fit_excluding({}, false);
    Gaussian2D fit_s = raw_s, fit_g = raw_g;
    if (pooled) std::tie(fit_s, fit_g) = pool_covariance(raw_s, ss.n, raw_g, sg.n);
    for (const auto& x : xs) {
        Form lab;
        if (loo) {
            Gaussian2D ms = ss.fit_excluding(x, true), mg = raw_g;
            if (pooled) std::tie(ms, mg) = pool_covariance(ms, ss.n - 1, raw_g, sg.n);
            lab = mlc_classify(x, ms, mg);
        } else {
            lab = mlc_classify(x, fit_s, fit_g);
        }
        (lab == Form::singleton ? rep.singleton_as_singleton : rep.singleton_as_geminate)++;
    }
    for (const auto& x : xg) {
        Form lab;
        if (loo) {
            Gaussian2D ms = raw_s, mg = sg.fit_excluding(x, true);
            if (pooled) std::tie(ms, mg) = pool_covariance(raw_s, ss.n, mg, sg.n - 1);
            lab = mlc_classify(x, ms, mg);
        } else {
            lab = mlc_classify(x, fit_s, fit_g);
        }
        (lab == Form::geminate ? rep.geminate_as_geminate : rep.geminate_as_singleton)++;
    }
    rep.error_percent = 100.0 * double(rep.singleton_as_geminate + rep.geminate_as_singleton) /
                        double(rep.total());
    return rep;
}

struct CurvePoint {
    double threshold = 0;
    double error_percent = 0;
};

struct Grid {
    double lo = 0.2;
    double hi = 2.0;
    double step = 0.005;
};

inline std::vector<CurvePoint> error_curve(std::span<const double> xs,
                                           std::span<const double> xg, const Grid& grid = {}) {
    if (!(grid.step > 0) || grid.hi < grid.lo) throw Error("bad threshold grid");
    std::vector<CurvePoint> out;
    const std::int64_t steps = std::int64_t(std::floor((grid.hi - grid.lo) / grid.step + 0.5));
    for (std::int64_t i = 0; i <= steps; ++i) {
        double t = grid.lo + double(i) * grid.step;
        out.push_back({t, threshold_error_percent(xs, xg, t)});
    }
    return out;
}

// Minimum of the curve and the set of grid thresholds achieving it.
inline std::pair<double, std::vector<double>> curve_minimum(std::span<const CurvePoint> curve) {
    if (curve.empty()) throw Error("empty error curve");
    double emin = curve[0].error_percent;
    for (const auto& p : curve) emin = std::min(emin, p.error_percent);
    std::vector<double> at;
    for (const auto& p : curve)
        if (p.error_percent == emin) at.push_back(p.threshold);
    return {emin, at};
}

}  // namespace gemkit::classify
