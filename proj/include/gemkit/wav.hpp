#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "types.hpp"

// Minimal RIFF/WAVE reader+writer: PCM, 16-bit, mono, little-endian.
// Samples are normalized to [-1, 1) on load (divide by 32768); save_wav
// quantizes back with round-to-nearest and clamping, so a load→save→load
// round trip is bit-exact.

namespace gemkit::wav {

namespace detail {

inline std::uint32_t rd_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}
inline std::uint16_t rd_u16(const unsigned char* p) {
    return std::uint16_t(p[0] | p[1] << 8);
}
inline void wr_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void wr_u16(std::string& s, std::uint16_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char(v >> 8));
}

}  // namespace detail

struct LoadOptions {
    double expected_rate = 10000.0;  // mismatch is a warning, not an error
};

struct LoadResult {
    SignalBuffer buffer;
    std::vector<std::string> warnings;
};

inline LoadResult load_wav_checked(const std::string& path, const LoadOptions& opt = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotWav("cannot open " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw NotWav(path + ": not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    LoadResult res;
    while (pos + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + pos);
        std::uint32_t size = detail::rd_u32(raw.data() + pos + 4);
        std::size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (body + 16 > raw.size()) throw TruncatedFile(path + ": fmt chunk truncated");
            format = detail::rd_u16(raw.data() + body);
            channels = detail::rd_u16(raw.data() + body + 2);
            rate = detail::rd_u32(raw.data() + body + 4);
            bits = detail::rd_u16(raw.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (!have_fmt) throw NotWav(path + ": data chunk before fmt chunk");
            if (format != 1) throw UnsupportedEncoding(path + ": non-PCM encoding");
            if (bits != 16) throw UnsupportedEncoding(path + ": not 16-bit");
            if (channels != 1) throw UnsupportedEncoding(path + ": not mono");
            if (body + size > raw.size())
                throw TruncatedFile(path + ": data chunk shorter than declared");
            res.buffer.sample_rate = double(rate);
            res.buffer.samples.resize(size / 2);
            for (std::size_t i = 0; i < res.buffer.samples.size(); ++i) {
                auto u = detail::rd_u16(raw.data() + body + 2 * i);
                res.buffer.samples[i] = double(std::int16_t(u)) / 32768.0;
            }
            if (opt.expected_rate > 0 && double(rate) != opt.expected_rate)
                res.warnings.push_back(path + ": sample rate " + std::to_string(rate) +
                                       " Hz differs from expected " +
                                       std::to_string(int(opt.expected_rate)));
            return res;
        }
        pos = body + size + (size & 1);  // chunks are padded to even length
    }
    throw TruncatedFile(path + ": missing data chunk");
}

inline SignalBuffer load_wav(const std::string& path, const LoadOptions& opt = {}) {
    return load_wav_checked(path, opt).buffer;
}

inline void save_wav(const SignalBuffer& buf, const std::string& path) {
    std::string out;
    const std::uint32_t n = std::uint32_t(buf.samples.size());
    const std::uint32_t rate = std::uint32_t(buf.sample_rate);
    out.reserve(44 + 2 * n);
    out += "RIFF";
    detail::wr_u32(out, 36 + 2 * n);
    out += "WAVEfmt ";
    detail::wr_u32(out, 16);
    detail::wr_u16(out, 1);  // PCM
    detail::wr_u16(out, 1);  // mono
    detail::wr_u32(out, rate);
    detail::wr_u32(out, rate * 2);  // byte rate
    detail::wr_u16(out, 2);         // block align
    detail::wr_u16(out, 16);        // bits
    out += "data";
    detail::wr_u32(out, 2 * n);
    for (double x : buf.samples) {
        double q = std::round(x * 32768.0);
        q = std::clamp(q, -32768.0, 32767.0);
        detail::wr_u16(out, std::uint16_t(std::int16_t(q)));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f.write(out.data(), std::streamsize(out.size()));
}

}  // namespace gemkit::wav
