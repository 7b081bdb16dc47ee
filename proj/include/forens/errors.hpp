#pragma once

#include <stdexcept>
#include <string>

namespace forens {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FORENS_DEFINE_ERROR(Name)          \
    struct Name : Error {                  \
        using Error::Error;                \
    }

// imgio
FORENS_DEFINE_ERROR(FileNotFound);
FORENS_DEFINE_ERROR(UnsupportedFormat);
FORENS_DEFINE_ERROR(CorruptStream);

// features
FORENS_DEFINE_ERROR(PlaneTooSmall);
FORENS_DEFINE_ERROR(EmptyPlane);
FORENS_DEFINE_ERROR(TooFewBlocks);
FORENS_DEFINE_ERROR(NoNonzeroCoefficients);

// classifier
FORENS_DEFINE_ERROR(TooFewSamples);
FORENS_DEFINE_ERROR(DimensionMismatch);
FORENS_DEFINE_ERROR(SingleClassTrainingSet);
FORENS_DEFINE_ERROR(NonConvergence);
FORENS_DEFINE_ERROR(TooFewSamplesPerClass);

// datasets
FORENS_DEFINE_ERROR(ParseError);
FORENS_DEFINE_ERROR(InvariantViolation);
FORENS_DEFINE_ERROR(InsufficientSamples);

// synth
FORENS_DEFINE_ERROR(RegionOutOfBounds);
FORENS_DEFINE_ERROR(DonorMissing);

// experiments
FORENS_DEFINE_ERROR(LengthMismatch);
FORENS_DEFINE_ERROR(EmptyInput);
FORENS_DEFINE_ERROR(PlanParseError);
FORENS_DEFINE_ERROR(PlanInvariantViolation);
FORENS_DEFINE_ERROR(WildFlagViolation);

// cli / registry
FORENS_DEFINE_ERROR(UnknownDataset);
FORENS_DEFINE_ERROR(UnknownMethod);

#undef FORENS_DEFINE_ERROR

} // namespace forens
