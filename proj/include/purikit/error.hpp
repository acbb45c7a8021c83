// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace purikit {

enum class ErrorCode {
    InvalidArgument,
    InvalidDimensions,
    WrongChannelCount,
    ShapeMismatch,
    FileNotFound,
    UnsupportedFormat,
    IoError,
    QualityOutOfRange,
    EncodeError,
    MalformedStream,
    UnsupportedJpegFeature,
    TooSmall,
    ZeroPerturbation,
    DuplicateMetric,
    BackendUnavailable,
    BackendFailed,
    BackendProtocolError,
    BackendTimeout,
    ScaleContractViolated,
    ScaleMismatch,
    MaskShapeMismatch,
    InvalidEllipse,
    EpsilonOutOfRange,
    PairingError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// The single exception type thrown by the library. Callers branch on
/// code(); what() carries a human-readable message prefixed by the code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace purikit
