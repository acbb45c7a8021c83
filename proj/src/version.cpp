// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/version.hpp"

namespace purikit {

std::string_view version() noexcept { return PURIKIT_VERSION; }

}  // namespace purikit
