#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "errors.hpp"

// The statistical battery: correlations with significance, one-way and
// main-effects factorial ANOVA, and the split-plot (mixed) repeated-measures
// ANOVA with a between-subjects Form factor.

namespace gemkit::stats {

inline constexpr double kSignificance = 0.05;  // p* threshold used in reports

// Upper-tail F probability. F = +inf is a degeneracy sentinel (p = 0).
inline double f_p_value(double F, int df_num, int df_den) {
    if (df_num < 1 || df_den < 1) throw Error("F distribution needs df >= 1");
    if (std::isinf(F)) return 0.0;
    if (!(F >= 0.0)) throw Error("F statistic must be >= 0");
    boost::math::fisher_f dist{double(df_num), double(df_den)};
    return boost::math::cdf(boost::math::complement(dist, F));
}

// Two-sided Student-t probability.
inline double t_p_value(double t, int df) {
    if (df < 1) throw Error("t distribution needs df >= 1");
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist{double(df)};
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

inline double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
}

// Sample variance (n-1 denominator).
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw Error("variance needs n >= 2");
    double m = mean(x), s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size() - 1);
}

// Average ranks (1-based), ties share the mean rank.
inline std::vector<double> ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        double shared = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = shared;
        i = j + 1;
    }
    return r;
}

enum class CorrelationKind { spearman, pearson };

struct CorrelationResult {
    double coefficient = 0;
    double p_value = 1;
    std::size_t n = 0;
    CorrelationKind kind = CorrelationKind::pearson;
    bool significant() const { return p_value < kSignificance; }
};

namespace detail {

inline double product_moment(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ConstantInput("correlation input has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

inline double correlation_p(double r, std::size_t n) {
    if (std::abs(r) >= 1.0) return 0.0;
    double t = r * std::sqrt(double(n - 2) / (1.0 - r * r));
    return t_p_value(t, int(n) - 2);
}

}  // namespace detail

inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("correlation inputs must have equal length");
    if (x.size() < 3) throw Error("correlation needs n >= 3");
    double r = detail::product_moment(x, y);
    return {r, detail::correlation_p(r, x.size()), x.size(), CorrelationKind::pearson};
}

inline CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("correlation inputs must have equal length");
    if (x.size() < 3) throw Error("correlation needs n >= 3");
    auto rx = ranks(x), ry = ranks(y);
    double r = detail::product_moment(rx, ry);
    return {r, detail::correlation_p(r, x.size()), x.size(), CorrelationKind::spearman};
}

// Exact two-sided permutation p for the Spearman coefficient, by enumeration
// of all distinct arrangements of the y ranks (n <= 10). With ties, every
// distinct arrangement stands for the same number of raw permutations, so
// uniform enumeration of arrangements is the exact test.
inline double spearman_exact_p(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3) throw Error("permutation test needs 3 <= n <= 10");
    if (n > 10) throw Error("exact permutation p limited to n <= 10");
    auto rx = ranks(x), ry = ranks(y);
    const double observed = std::abs(detail::product_moment(rx, ry));

    double mx = mean(rx), my = mean(ry);
    double sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double denom = std::sqrt(sxx * syy);

    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::uint64_t total = 0, at_least = 0;
    do {
        double sxy = 0;
        for (std::size_t i = 0; i < n; ++i) sxy += (rx[i] - mx) * (perm[i] - my);
        ++total;
        if (std::abs(sxy / denom) >= observed - 1e-12) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return double(at_least) / double(total);
}

// For untied data: the classical 1 - 6*sum(d^2)/(n(n^2-1)) formula.
inline double spearman_exact_formula(std::span<const double> x, std::span<const double> y) {
    auto rx = ranks(x), ry = ranks(y);
    double d2 = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    double n = double(rx.size());
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// --- ANOVA ---

struct EffectRow {
    std::string effect;
    double F = 0;
    int df_num = 0;
    int df_den = 0;
    double p = 1;
    bool significant = false;
};

struct AnovaResult {
    std::vector<EffectRow> effects;
    const EffectRow& operator[](const std::string& name) const {
        for (const auto& e : effects)
            if (e.effect == name) return e;
        throw Error("no effect named " + name);
    }
};

namespace detail {

inline EffectRow make_row(std::string name, double ss_eff, int df_eff, double ss_err,
                          int df_err, double zero_scale) {
    // Degeneracy conventions: no effect variance -> F = 0, p = 1; effect
    // variance over a zero error term -> F = +inf, p = 0.
    const double tol = 1e-12 * std::max(zero_scale, 1e-300);
    EffectRow row{std::move(name), 0, df_eff, df_err, 1.0, false};
    const double ms_eff = ss_eff / double(df_eff);
    const double ms_err = ss_err / double(df_err);
    if (ss_eff <= tol)
        row.F = 0.0, row.p = 1.0;
    else if (ss_err <= tol)
        row.F = std::numeric_limits<double>::infinity(), row.p = 0.0;
    else {
        row.F = ms_eff / ms_err;
        row.p = f_p_value(row.F, df_eff, df_err);
    }
    row.significant = row.p < kSignificance;
    return row;
}

}  // namespace detail

// One-way fixed-effects ANOVA over k groups.
inline AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups,
                                const std::string& effect_name = "between") {
    if (groups.size() < 2) throw DegenerateGroups("need at least two groups");
    for (const auto& g : groups)
        if (g.size() < 2) throw DegenerateGroups("every group needs n >= 2");
    std::size_t n_total = 0;
    double grand = 0;
    for (const auto& g : groups) {
        n_total += g.size();
        grand = std::accumulate(g.begin(), g.end(), grand);
    }
    grand /= double(n_total);
    double ss_between = 0, ss_within = 0;
    for (const auto& g : groups) {
        double m = mean(g);
        ss_between += double(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ss_within += (v - m) * (v - m);
    }
    AnovaResult res;
    res.effects.push_back(detail::make_row(effect_name, ss_between, int(groups.size()) - 1,
                                           ss_within, int(n_total - groups.size()),
                                           ss_between + ss_within));
    return res;
}

// Balanced main-effects-only factorial ANOVA. y is the response; factors[i]
// gives, per observation, the level index (0-based) of factor i; levels[i]
// is the level count. Interactions are pooled into the residual.
inline AnovaResult anova_factorial(std::span<const double> y,
                                   const std::vector<std::vector<int>>& factors,
                                   const std::vector<std::string>& names,
                                   const std::vector<int>& levels) {
    const std::size_t n = y.size();
    if (factors.size() != names.size() || factors.size() != levels.size() || factors.empty())
        throw Error("factor arrays must be parallel and non-empty");
    for (const auto& f : factors)
        if (f.size() != n) throw Error("factor column length mismatch");

    // Balance check over the full cross-classification.
    {
        std::vector<std::size_t> strides(levels.size(), 1);
        std::size_t ncells = 1;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            strides[i] = ncells;
            ncells *= std::size_t(levels[i]);
        }
        std::vector<std::size_t> counts(ncells, 0);
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t cell = 0;
            for (std::size_t i = 0; i < factors.size(); ++i) {
                int lv = factors[i][r];
                if (lv < 0 || lv >= levels[i]) throw Error("factor level out of range");
                cell += strides[i] * std::size_t(lv);
            }
            ++counts[cell];
        }
        for (std::size_t c = 0; c < ncells; ++c) {
            if (counts[c] == 0) throw EmptyCell("empty design cell");
            if (counts[c] != counts[0]) throw UnbalancedDesign("unequal cell counts");
        }
    }

    const double grand = mean(y);
    double ss_total = 0;
    for (double v : y) ss_total += (v - grand) * (v - grand);

    double ss_mains = 0;
    int df_mains = 0;
    std::vector<std::pair<double, int>> eff;  // (ss, df) per factor
    for (std::size_t i = 0; i < factors.size(); ++i) {
        std::vector<double> sum(std::size_t(levels[i]), 0.0);
        std::vector<std::size_t> cnt(std::size_t(levels[i]), 0);
        for (std::size_t r = 0; r < n; ++r) {
            sum[std::size_t(factors[i][r])] += y[r];
            ++cnt[std::size_t(factors[i][r])];
        }
        double ss = 0;
        for (std::size_t l = 0; l < sum.size(); ++l) {
            double m = sum[l] / double(cnt[l]);
            ss += double(cnt[l]) * (m - grand) * (m - grand);
        }
        eff.push_back({ss, levels[i] - 1});
        ss_mains += ss;
        df_mains += levels[i] - 1;
    }
    double ss_res = ss_total - ss_mains;
    if (ss_res < 0) ss_res = 0;  // clip fp cancellation
    int df_res = int(n) - 1 - df_mains;
    if (df_res < 1) throw Error("no residual degrees of freedom");

    AnovaResult res;
    for (std::size_t i = 0; i < factors.size(); ++i)
        res.effects.push_back(
            detail::make_row(names[i], eff[i].first, eff[i].second, ss_res, df_res, ss_total));
    return res;
}

// --- split-plot repeated measures ---

// One subject (a speaker within one form) with its within-subject grid of
// cell means, cells[vowel][consonant], pre-averaged over repetitions.
struct SubjectCells {
    int form = 0;  // 0 = singleton group, 1 = geminate group
    std::vector<std::vector<double>> cells;
};

// Mixed ANOVA: Form between subjects, Vowel and Consonant within, sphericity
// assumed. Each within effect (and its Form interaction) is tested against
// its own effect-by-subject-within-form error term.
inline AnovaResult anova_repeated(const std::vector<SubjectCells>& subjects,
                                  const std::string& vowel_name = "Vowel",
                                  const std::string& consonant_name = "Consonant",
                                  const std::string& form_name = "Form") {
    const std::size_t S = subjects.size();
    if (S < 4) throw TooFewSubjects("need at least two subjects per form");
    const std::size_t nv = subjects[0].cells.size();
    if (nv < 2) throw IncompleteGrid("need at least two within levels");
    const std::size_t nc = subjects[0].cells[0].size();
    if (nc < 2) throw IncompleteGrid("need at least two within levels");
    std::size_t per_form[2] = {0, 0};
    for (const auto& s : subjects) {
        if (s.form != 0 && s.form != 1) throw Error("form must be 0 or 1");
        ++per_form[s.form];
        if (s.cells.size() != nv) throw IncompleteGrid("subject grid shape mismatch");
        for (const auto& row : s.cells)
            if (row.size() != nc) throw IncompleteGrid("subject grid shape mismatch");
    }
    if (per_form[0] < 2 || per_form[1] < 2)
        throw TooFewSubjects("need at least two subjects per form");
    if (per_form[0] != per_form[1])
        throw UnbalancedDesign("equal subject counts per form required");

    const double half = double(per_form[0]);
    auto G = 0.0;
    std::vector<double> m_s(S, 0.0);
    double m_f[2] = {0, 0};
    std::vector<double> m_v(nv, 0.0), m_c(nc, 0.0);
    std::vector<std::array<double, 2>> m_vf(nv, {0, 0}), m_cf(nc, {0, 0});
    std::vector<std::vector<double>> m_sv(S, std::vector<double>(nv, 0.0));
    std::vector<std::vector<double>> m_sc(S, std::vector<double>(nc, 0.0));

    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t c = 0; c < nc; ++c) {
                double x = subjects[s].cells[v][c];
                G += x;
                m_s[s] += x;
                m_f[subjects[s].form] += x;
                m_v[v] += x;
                m_c[c] += x;
                m_vf[v][std::size_t(subjects[s].form)] += x;
                m_cf[c][std::size_t(subjects[s].form)] += x;
                m_sv[s][v] += x;
                m_sc[s][c] += x;
            }
    const double cells_per_subject = double(nv * nc);
    G /= double(S) * cells_per_subject;
    for (auto& v : m_s) v /= cells_per_subject;
    for (auto& v : m_f) v /= half * cells_per_subject;
    for (auto& v : m_v) v /= double(S * nc);
    for (auto& v : m_c) v /= double(S * nv);
    for (auto& row : m_vf)
        for (auto& v : row) v /= half * double(nc);
    for (auto& row : m_cf)
        for (auto& v : row) v /= half * double(nv);
    for (auto& row : m_sv)
        for (auto& v : row) v /= double(nc);
    for (auto& row : m_sc)
        for (auto& v : row) v /= double(nv);

    double ss_form = 0;
    for (double f : m_f) ss_form += half * cells_per_subject * (f - G) * (f - G);
    double ss_subj = 0;
    for (std::size_t s = 0; s < S; ++s) {
        double d = m_s[s] - m_f[subjects[s].form];
        ss_subj += cells_per_subject * d * d;
    }
    double ss_v = 0;
    for (double v : m_v) ss_v += double(S * nc) * (v - G) * (v - G);
    double ss_vf = 0;
    for (std::size_t v = 0; v < nv; ++v)
        for (int f = 0; f < 2; ++f) {
            double d = m_vf[v][std::size_t(f)] - m_v[v] - m_f[f] + G;
            ss_vf += half * double(nc) * d * d;
        }
    double ss_err_v = 0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t v = 0; v < nv; ++v) {
            double d = m_sv[s][v] - m_s[s] - m_vf[v][std::size_t(subjects[s].form)] +
                       m_f[subjects[s].form];
            ss_err_v += double(nc) * d * d;
        }
    double ss_c = 0;
    for (double c : m_c) ss_c += double(S * nv) * (c - G) * (c - G);
    double ss_cf = 0;
    for (std::size_t c = 0; c < nc; ++c)
        for (int f = 0; f < 2; ++f) {
            double d = m_cf[c][std::size_t(f)] - m_c[c] - m_f[f] + G;
            ss_cf += half * double(nv) * d * d;
        }
    double ss_err_c = 0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t c = 0; c < nc; ++c) {
            double d = m_sc[s][c] - m_s[s] - m_cf[c][std::size_t(subjects[s].form)] +
                       m_f[subjects[s].form];
            ss_err_c += double(nv) * d * d;
        }

    double scale = 0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t c = 0; c < nc; ++c) {
                double d = subjects[s].cells[v][c] - G;
                scale += d * d;
            }

    const int df_subj = int(S) - 2;
    AnovaResult res;
    res.effects.push_back(detail::make_row(form_name, ss_form, 1, ss_subj, df_subj, scale));
    res.effects.push_back(detail::make_row(vowel_name, ss_v, int(nv) - 1, ss_err_v,
                                           (int(nv) - 1) * df_subj, scale));
    res.effects.push_back(detail::make_row(vowel_name + "*" + form_name, ss_vf, int(nv) - 1,
                                           ss_err_v, (int(nv) - 1) * df_subj, scale));
    res.effects.push_back(detail::make_row(consonant_name, ss_c, int(nc) - 1, ss_err_c,
                                           (int(nc) - 1) * df_subj, scale));
    res.effects.push_back(detail::make_row(consonant_name + "*" + form_name, ss_cf,
                                           int(nc) - 1, ss_err_c, (int(nc) - 1) * df_subj,
                                           scale));
    return res;
}

}  // namespace gemkit::stats
