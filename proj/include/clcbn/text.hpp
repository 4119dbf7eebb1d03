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

#ifndef CLCBN_TEXT_HPP_
#define CLCBN_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace clcbn::text {

// UTF-8 <-> UTF-32. Invalid UTF-8 raises Error(kBadFormat).
std::u32string ToU32(std::string_view utf8);
std::string ToUtf8(std::u32string_view u32);

std::string Nfc(std::string_view utf8);
// Full Unicode lowercase mapping (root locale).
std::string Lower(std::string_view utf8);
// Nfc(Lower(s)).
std::string Normalize(std::string_view utf8);

bool IsWhitespace(char32_t c);
bool IsPunctuation(char32_t c);  // general category P*
// Characters allowed inside a counted ngram: everything except
// punctuation (P*), symbols (S*), numbers (N*), separators (Z*),
// controls and whitespace.
bool IsNgramChar(char32_t c);

std::string Trim(std::string_view utf8);

// Lowercase, split on Unicode whitespace, strip leading/trailing P* from
// every token, drop empties. Interior punctuation is kept.
std::vector<std::string> Tokenize(std::string_view utf8);

// Number of code points.
size_t Length(std::string_view utf8);

}  // namespace clcbn::text

#endif  // CLCBN_TEXT_HPP_
