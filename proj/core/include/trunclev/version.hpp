// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace trunclev {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

}  // namespace trunclev
