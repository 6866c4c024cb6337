/*
 * Copyright 2026 The ddr4bench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddr4bench {

enum class ErrorCode {
    IllegalCommand,
    OutOfRange,
    InvalidBurst,
    BadChannel,
    BadConfig,
    Busy,
    EmptyBatch,
    Timeout,
    ShapeMismatch,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code selects the protocol
/// error token reported by the host controller.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ddr4bench
