#pragma once
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "errors.hpp"
#include "segmentation.hpp"

// Log-energy parameters over segments and reference frames. All values are
// 10*log10 of sums of squared (normalized) samples; average power is derived
// as e_tot - 10*log10(N) so the total-vs-power identity is exact.

namespace gemkit::energy {

struct SegmentEnergy {
    double e_tot = 0;   // 10*log10(sum x^2)
    double p_mean = 0;  // e_tot - 10*log10(N)
};

inline double sum_squares(std::span<const double> x, std::int64_t start, std::int64_t end) {
    double s = 0;
    for (std::int64_t i = start; i < end; ++i) s += x[std::size_t(i)] * x[std::size_t(i)];
    return s;
}

inline SegmentEnergy segment_energy(std::span<const double> signal, std::int64_t start,
                                    std::int64_t end) {
    if (!(0 <= start && start < end && end <= std::int64_t(signal.size())))
        throw EmptyInterval("segment [" + std::to_string(start) + "," + std::to_string(end) +
                            ") is empty or outside the signal");
    double e = sum_squares(signal, start, end);
    if (e <= 0.0) throw SilentSegment("segment energy is zero");
    SegmentEnergy out;
    out.e_tot = 10.0 * std::log10(e);
    out.p_mean = out.e_tot - 10.0 * std::log10(double(end - start));
    return out;
}

// Instantaneous (frame) energy on the raw, un-windowed 256 samples.
inline double frame_energy(std::span<const double> signal, const seg::FrameSpan& frame) {
    if (frame.start < 0 || frame.end() > std::int64_t(signal.size()))
        throw EmptyInterval("frame outside the signal");
    double e = sum_squares(signal, frame.start, frame.end());
    if (e <= 0.0) throw SilentSegment("frame energy is zero");
    return 10.0 * std::log10(e);
}

// The eight energy parameters. Silent segments/frames are explicit markers
// (nullopt), never zeros.
struct EnergyParams {
    std::optional<double> e_tot_v1, p_v1;
    std::optional<double> e_tot_c, p_c;
    std::optional<double> e_i_v1cent;  // V1_CENTRE frame
    std::optional<double> e_i_v1_c;    // V1_TO_C_TRANSITION frame
    std::optional<double> e_i_ccent;   // C_CENTRE frame
    std::optional<double> e_i_coff;    // C_OFFSET frame
};

// Segment (total/average) energies only — used when the token is too short
// for the 256-sample frames and instantaneous measures are withheld.
inline EnergyParams energy_params(std::span<const double> signal, const seg::Annotation& ann) {
    ann.validate(std::int64_t(signal.size()));
    EnergyParams p;
    auto seg_pair = [&](std::int64_t a, std::int64_t b, std::optional<double>& et,
                        std::optional<double>& pm) {
        try {
            SegmentEnergy e = segment_energy(signal, a, b);
            et = e.e_tot;
            pm = e.p_mean;
        } catch (const SilentSegment&) {
        }
    };
    seg_pair(ann.v1_onset, ann.v1_offset, p.e_tot_v1, p.p_v1);
    seg_pair(ann.v1_offset, ann.v2_onset, p.e_tot_c, p.p_c);
    return p;
}

inline EnergyParams energy_params(std::span<const double> signal, const seg::Annotation& ann,
                                  const seg::FrameSet& frames) {
    EnergyParams p = energy_params(signal, ann);
    auto frame_val = [&](seg::Frame f) -> std::optional<double> {
        try {
            return frame_energy(signal, frames[f]);
        } catch (const SilentSegment&) {
            return std::nullopt;
        }
    };
    p.e_i_v1cent = frame_val(seg::Frame::V1_CENTRE);
    p.e_i_v1_c = frame_val(seg::Frame::V1_TO_C_TRANSITION);
    p.e_i_ccent = frame_val(seg::Frame::C_CENTRE);
    p.e_i_coff = frame_val(seg::Frame::C_OFFSET);
    return p;
}

}  // namespace gemkit::energy
