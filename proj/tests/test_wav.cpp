#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gemkit/errors.hpp>
#include <gemkit/synth.hpp>
#include <gemkit/wav.hpp>

using namespace gemkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto d = fs::temp_directory_path() / "gemkit_wav_tests";
    fs::create_directories(d);
    return d;
}

void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& s, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) s.push_back(char((v >> (8 * i)) & 0xFF));
}

// Hand-rolled WAV so the tests do not depend on save_wav for hostile cases.
std::string raw_wav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                    std::uint16_t bits, const std::string& payload,
                    std::uint32_t declared_payload = 0xFFFFFFFF,
                    const std::string& extra_chunk = "") {
    std::string d = "RIFF";
    std::string body = "WAVE";
    body += extra_chunk;
    body += "fmt ";
    put_u32(body, 16);
    put_u16(body, format);
    put_u16(body, channels);
    put_u32(body, rate);
    put_u32(body, rate * channels * bits / 8);
    put_u16(body, std::uint16_t(channels * bits / 8));
    put_u16(body, bits);
    body += "data";
    put_u32(body, declared_payload == 0xFFFFFFFF ? std::uint32_t(payload.size())
                                                 : declared_payload);
    body += payload;
    put_u32(d, std::uint32_t(body.size()));
    d += body;
    return d;
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(bytes.data(), std::streamsize(bytes.size()));
}

}  // namespace

TEST_CASE("save/load round-trips int16 samples bit-exactly") {
    auto path = (temp_dir() / "roundtrip.wav").string();
    SignalBuffer buf;
    buf.sample_rate = 10000;
    std::mt19937_64 rng(42);
    for (int i = 0; i < 4096; ++i) {
        auto q = std::int16_t(rng() & 0xFFFF);
        buf.samples.push_back(double(q) / 32768.0);
    }
    wav::save_wav(buf, path);
    SignalBuffer back = wav::load_wav(path);
    REQUIRE(back.samples.size() == buf.samples.size());
    CHECK(back.sample_rate == 10000.0);
    for (std::size_t i = 0; i < buf.samples.size(); ++i)
        REQUIRE(back.samples[i] == buf.samples[i]);
}

TEST_CASE("one second of 10 kHz mono PCM loads as 10000 samples") {
    auto path = (temp_dir() / "second.wav").string();
    write_file(path, raw_wav(1, 1, 10000, 16, std::string(20000, '\0')));
    auto res = wav::load_wav_checked(path);
    CHECK(res.buffer.samples.size() == 10000);
    CHECK(res.buffer.sample_rate == 10000.0);
    CHECK(res.warnings.empty());
}

TEST_CASE("unsupported encodings are rejected") {
    auto dir = temp_dir();
    write_file(dir / "stereo.wav", raw_wav(1, 2, 10000, 16, std::string(8, '\0')));
    CHECK_THROWS_AS(wav::load_wav((dir / "stereo.wav").string()), UnsupportedEncoding);
    write_file(dir / "float.wav", raw_wav(3, 1, 10000, 16, std::string(8, '\0')));
    CHECK_THROWS_AS(wav::load_wav((dir / "float.wav").string()), UnsupportedEncoding);
    write_file(dir / "8bit.wav", raw_wav(1, 1, 10000, 8, std::string(8, '\0')));
    CHECK_THROWS_AS(wav::load_wav((dir / "8bit.wav").string()), UnsupportedEncoding);
}

TEST_CASE("short data chunk raises TruncatedFile") {
    auto path = (temp_dir() / "short.wav").string();
    write_file(path, raw_wav(1, 1, 10000, 16, std::string(100, '\0'), 200));
    CHECK_THROWS_AS(wav::load_wav(path), TruncatedFile);
}

TEST_CASE("non-RIFF input raises NotWav") {
    auto path = (temp_dir() / "notwav.wav").string();
    write_file(path, "this is not audio at all, not even close, really");
    CHECK_THROWS_AS(wav::load_wav(path), NotWav);
    CHECK_THROWS_AS(wav::load_wav((temp_dir() / "missing.wav").string()), NotWav);
}

TEST_CASE("unknown chunks are skipped, including odd-sized ones") {
    std::string extra = "LIST";
    put_u32(extra, 3);
    extra += "abc";
    extra.push_back('\0');  // pad byte to even boundary
    auto path = (temp_dir() / "chunky.wav").string();
    write_file(path, raw_wav(1, 1, 10000, 16, std::string(8, '\0'), 0xFFFFFFFF, extra));
    auto res = wav::load_wav_checked(path);
    CHECK(res.buffer.samples.size() == 4);
}

TEST_CASE("sample-rate mismatch is a warning, not an error") {
    auto path = (temp_dir() / "rate.wav").string();
    write_file(path, raw_wav(1, 1, 22050, 16, std::string(8, '\0')));
    auto res = wav::load_wav_checked(path);
    CHECK(res.buffer.sample_rate == 22050.0);
    REQUIRE(res.warnings.size() == 1);
    CHECK(res.warnings[0].find("22050") != std::string::npos);
}

TEST_CASE("save_wav quantizes with clamping") {
    auto path = (temp_dir() / "clamp.wav").string();
    SignalBuffer buf;
    buf.samples = {1.5, -1.5, 0.0, 0.5};
    wav::save_wav(buf, path);
    SignalBuffer back = wav::load_wav(path);
    CHECK(back.samples[0] == Catch::Approx(32767.0 / 32768.0));
    CHECK(back.samples[1] == -1.0);
    CHECK(back.samples[2] == 0.0);
    CHECK(back.samples[3] == 0.5);
}
