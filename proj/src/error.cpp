// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/error.hpp"

namespace purikit {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::WrongChannelCount: return "WrongChannelCount";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::QualityOutOfRange: return "QualityOutOfRange";
    case ErrorCode::EncodeError: return "EncodeError";
    case ErrorCode::MalformedStream: return "MalformedStream";
    case ErrorCode::UnsupportedJpegFeature: return "UnsupportedJpegFeature";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::ZeroPerturbation: return "ZeroPerturbation";
    case ErrorCode::DuplicateMetric: return "DuplicateMetric";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BackendFailed: return "BackendFailed";
    case ErrorCode::BackendProtocolError: return "BackendProtocolError";
    case ErrorCode::BackendTimeout: return "BackendTimeout";
    case ErrorCode::ScaleContractViolated: return "ScaleContractViolated";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::MaskShapeMismatch: return "MaskShapeMismatch";
    case ErrorCode::InvalidEllipse: return "InvalidEllipse";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::PairingError: return "PairingError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

}  // namespace purikit
