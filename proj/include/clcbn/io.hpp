// Copyright 2026 The clcbn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLCBN_IO_HPP_
#define CLCBN_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clcbn::io {

// Whole file as bytes. Throws Error(kIo).
std::string ReadFile(const std::filesystem::path& path);
// Lines without terminators; a trailing '\r' is dropped.
std::vector<std::string> ReadLines(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view data);

std::vector<std::string_view> SplitTabs(std::string_view line);

// Lines that are neither blank nor `#` comments.
bool IsDataLine(std::string_view line);

std::string FormatFixed(double value, int decimals);

}  // namespace clcbn::io

#endif  // CLCBN_IO_HPP_
