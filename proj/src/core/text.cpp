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

#include "clcbn/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "clcbn/error.hpp"

namespace clcbn::text {

std::u32string ToU32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(utf8.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c < 0) throw Error(ErrorCode::kBadFormat, "invalid UTF-8 sequence");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string ToUtf8(std::u32string_view u32) {
  std::string out;
  out.reserve(u32.size() * 2);
  for (char32_t c : u32) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), err);
    if (err) throw Error(ErrorCode::kBadFormat, "code point out of range");
    out.append(reinterpret_cast<const char*>(buf), len);
  }
  return out;
}

namespace {

icu::UnicodeString FromUtf8Checked(std::string_view utf8) {
  // Validate first; ICU silently substitutes U+FFFD otherwise.
  (void)ToU32(utf8);
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string AsUtf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

}  // namespace

std::string Nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "ICU NFC unavailable");
  icu::UnicodeString src = FromUtf8Checked(utf8);
  if (nfc->isNormalized(src, status) && U_SUCCESS(status)) {
    return std::string(utf8);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInternal, "NFC normalization failed");
  return AsUtf8(dst);
}

std::string Lower(std::string_view utf8) {
  icu::UnicodeString u = FromUtf8Checked(utf8);
  u.toLower(icu::Locale::getRoot());
  return AsUtf8(u);
}

std::string Normalize(std::string_view utf8) { return Nfc(Lower(utf8)); }

bool IsWhitespace(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool IsPunctuation(char32_t c) { return u_ispunct(static_cast<UChar32>(c)); }

bool IsNgramChar(char32_t c) {
  const auto cp = static_cast<UChar32>(c);
  if (u_isUWhiteSpace(cp)) return false;
  const uint32_t mask = U_GET_GC_MASK(cp);
  constexpr uint32_t kExcluded = U_GC_P_MASK | U_GC_S_MASK | U_GC_N_MASK |
                                 U_GC_Z_MASK | U_GC_CC_MASK | U_GC_CN_MASK;
  return (mask & kExcluded) == 0;
}

std::string Trim(std::string_view utf8) {
  std::u32string u = ToU32(utf8);
  size_t b = 0, e = u.size();
  while (b < e && IsWhitespace(u[b])) ++b;
  while (e > b && IsWhitespace(u[e - 1])) --e;
  return ToUtf8(std::u32string_view(u).substr(b, e - b));
}

std::vector<std::string> Tokenize(std::string_view utf8) {
  std::vector<std::string> tokens;
  const std::u32string u = ToU32(Normalize(utf8));
  size_t i = 0;
  while (i < u.size()) {
    while (i < u.size() && IsWhitespace(u[i])) ++i;
    size_t j = i;
    while (j < u.size() && !IsWhitespace(u[j])) ++j;
    size_t b = i, e = j;
    while (b < e && IsPunctuation(u[b])) ++b;
    while (e > b && IsPunctuation(u[e - 1])) --e;
    if (e > b) tokens.push_back(ToUtf8(std::u32string_view(u).substr(b, e - b)));
    i = j;
  }
  return tokens;
}

size_t Length(std::string_view utf8) {
  size_t n = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace clcbn::text
