#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gemkit {

// Base for everything gemkit throws; catch this to handle any library error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- corpus / IO ---
struct MalformedName : Error { using Error::Error; };
struct UnknownWord : MalformedName {
    std::string word, speaker;
    int repetition;
    UnknownWord(std::string w, std::string spk, int rep)
        : MalformedName("unknown word \"" + w + "\" (speaker " + spk +
                        ", repetition " + std::to_string(rep) + ")"),
          word(std::move(w)), speaker(std::move(spk)), repetition(rep) {}
};
struct MissingRoot : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };
struct NotWav : Error { using Error::Error; };
struct UnsupportedEncoding : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };

// --- segmentation ---
struct FrameOutOfBounds : Error {
    std::vector<std::string> frames;  // names of all frames that failed
    FrameOutOfBounds(std::string msg, std::vector<std::string> f)
        : Error(std::move(msg)), frames(std::move(f)) {}
};
struct MalformedRow : Error {
    std::size_t line;
    MalformedRow(std::string msg, std::size_t ln)
        : Error(msg + " (line " + std::to_string(ln) + ")"), line(ln) {}
};
struct DuplicateEntry : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

// --- spectral ---
struct WrongLength : Error { using Error::Error; };
struct DegenerateFrame : Error { using Error::Error; };
struct InsufficientFormants : Error {
    int found;
    explicit InsufficientFormants(int k)
        : Error("only " + std::to_string(k) + " formant candidate(s) found"), found(k) {}
};
struct RegionTooShort : Error { using Error::Error; };

// --- energy ---
struct EmptyInterval : Error { using Error::Error; };
struct SilentSegment : Error { using Error::Error; };

// --- stats ---
struct ConstantInput : Error { using Error::Error; };
struct DegenerateGroups : Error { using Error::Error; };
struct UnbalancedDesign : Error { using Error::Error; };
struct EmptyCell : Error { using Error::Error; };
struct IncompleteGrid : Error { using Error::Error; };
struct TooFewSubjects : Error { using Error::Error; };

// --- classify ---
struct DegenerateSample : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NoInteriorRoot : Error { using Error::Error; };
struct DegenerateVariance : Error { using Error::Error; };
struct MissingFeature : Error { using Error::Error; };
struct SingleClassGroup : Error { using Error::Error; };

// --- synth / cli ---
struct BadMoments : Error { using Error::Error; };
struct SpecOutOfRange : Error { using Error::Error; };
struct BadConfig : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };

}  // namespace gemkit
