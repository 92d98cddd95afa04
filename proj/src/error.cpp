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

#include "actseg/error.hpp"

namespace actseg {

int exit_code_for(const Error& e) noexcept
{
    if (dynamic_cast<const ArgumentError*>(&e))
        return 2;
    if (dynamic_cast<const NumericalError*>(&e))
        return 4;
    return 3;
}

} // namespace actseg
