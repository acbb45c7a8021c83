// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "tempdir.hpp"

#include <stdlib.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "purikit/error.hpp"

namespace purikit::detail {

TempDir::TempDir()
{
    std::string pattern = (std::filesystem::temp_directory_path() / "purikit-XXXXXX").string();
    if (!mkdtemp(pattern.data()))
        fail(ErrorCode::IoError, "cannot create temporary directory: " + std::string(std::strerror(errno)));
    path_ = pattern;
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace purikit::detail
