#pragma once

#include <stdexcept>
#include <string>

namespace ballast {

/// Base class for every domain error raised by the library. CLI maps these
/// to exit code 1; usage errors are handled by the argument parser.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// time series
struct NonIntegerRatio : Error { using Error::Error; };
struct EmptySeries : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct UnitMismatch : Error { using Error::Error; };
struct SignalGap : Error { using Error::Error; };

// envelope
struct NonPositiveProperty : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };
struct SingularZ12 : Error { using Error::Error; };

// thermal model
struct StepMismatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct ConstantTruth : Error { using Error::Error; };
struct ZeroScale : Error { using Error::Error; };
struct UnstableModel : Error { using Error::Error; };

// controller / simulator
struct HorizonOverrun : Error { using Error::Error; };
struct ModelMissing : Error { using Error::Error; };
struct EmptyLedger : Error { using Error::Error; };

// comfort
struct NoConvergence : Error { using Error::Error; };

// tuner
struct NoFeasibleCell : Error { using Error::Error; };

// configuration / io
struct ParseError : Error { using Error::Error; };
struct MissingKey : Error { using Error::Error; };
struct PathNotFound : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace ballast
