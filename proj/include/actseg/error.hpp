// Copyright 2026 The actseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace actseg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class SequenceGapError : public Error { using Error::Error; };
class LengthMismatchError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };
class EmptyWindowError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };
class CompatibilityError : public Error { using Error::Error; };

/// Process exit code for an error: 2 usage, 3 data, 4 numeric failure.
int exit_code_for(const Error& e) noexcept;

} // namespace actseg
