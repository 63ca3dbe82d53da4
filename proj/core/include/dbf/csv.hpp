/*
   Copyright 2026 The dbf Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dbf {

/// Locale-independent shortest-safe rendering: 17 significant digits, '.'
/// decimal point, no grouping. Non-finite values render as nan/inf/-inf.
std::string format_real(double value);

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`. Throws IoError if either step fails.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace dbf
