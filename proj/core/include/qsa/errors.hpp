#pragma once

#include <stdexcept>
#include <string>

namespace qsa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model construction.
struct AllDegenerate : Error { using Error::Error; };
struct TooSmall : Error { using Error::Error; };

// Kernel construction and spectra.
struct InvalidProposal : Error { using Error::Error; };
struct MismatchError : Error { using Error::Error; };
struct NegativeEigenvalue : Error { using Error::Error; };

// Walk and phase estimation.
struct DimensionTooLarge : Error { using Error::Error; };
struct CompletionFailure : Error { using Error::Error; };
struct RegisterTooWide : Error { using Error::Error; };

// Schedules.
struct ZeroGap : Error { using Error::Error; };

// Harness.
struct UnknownFamily : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace qsa
