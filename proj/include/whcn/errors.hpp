#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace whcn {

// Base class for all library errors; the CLI catches this at stage boundaries.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define WHCN_DEFINE_ERROR(Name)                                                \
    struct Name : Error {                                                      \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}     \
    }

WHCN_DEFINE_ERROR(NotSquare);
WHCN_DEFINE_ERROR(NotSymmetric);
WHCN_DEFINE_ERROR(ShapeMismatch);
WHCN_DEFINE_ERROR(NonFiniteEvaluation);
WHCN_DEFINE_ERROR(InvalidConfig);
WHCN_DEFINE_ERROR(IoError);
WHCN_DEFINE_ERROR(EmptyCloud);
WHCN_DEFINE_ERROR(TooFewPoints);
WHCN_DEFINE_ERROR(InvalidK);
WHCN_DEFINE_ERROR(TooLarge);
WHCN_DEFINE_ERROR(EmptyCorpus);
WHCN_DEFINE_ERROR(EmptySceneLabels);
WHCN_DEFINE_ERROR(NoSeeds);
WHCN_DEFINE_ERROR(DegenerateHyperedge);
WHCN_DEFINE_ERROR(NoLabeledVertices);
WHCN_DEFINE_ERROR(LengthMismatch);

#undef WHCN_DEFINE_ERROR

// Carries the 1-based line number of the offending input line.
struct ParseError : Error {
    std::size_t line;
    ParseError(std::size_t line_no, const std::string& msg)
        : Error("ParseError at line " + std::to_string(line_no) + ": " + msg),
          line(line_no) {}
};

}  // namespace whcn
