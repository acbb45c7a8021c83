// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace purikit {

std::string_view version() noexcept;

}  // namespace purikit
