#pragma once

#include <stdexcept>
#include <string>

namespace ovia {

/// Base class for all pipeline errors. Subcommands map these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// imagery
struct MissingFile : Error { using Error::Error; };
struct MalformedHeader : Error { using Error::Error; };
struct TruncatedPayload : Error { using Error::Error; };
struct InvalidLabel : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct InvalidManifest : Error { using Error::Error; };

// synth
struct SpecOutOfFrame : Error { using Error::Error; };

// morphology
struct EmptyInput : Error { using Error::Error; };
struct FrameTooSmall : Error { using Error::Error; };

// geometry
struct InsufficientPoints : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct NonpositiveArea : Error { using Error::Error; };
struct MissingCytoplasm : Error { using Error::Error; };
struct MissingZona : Error { using Error::Error; };

// texture
struct ImageTooSmall : Error { using Error::Error; };
struct EmptyMask : Error { using Error::Error; };

// features / svm
struct TooFewSamples : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct DegenerateLabels : Error { using Error::Error; };
struct TooFewPerClass : Error { using Error::Error; };

// eval
struct SizeMismatch : Error { using Error::Error; };
struct SingleClass : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };

}  // namespace ovia
