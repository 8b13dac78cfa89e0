// Copyright (c) 2026 The RecallNER Authors. All Rights Reserved.
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

#ifndef RECALLNER_TEXT_H_
#define RECALLNER_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace recallner::text {

// UTF-8 <-> code points. Character offsets everywhere in this project count
// Unicode scalar values, never bytes.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view code_points);
std::string encode_utf8(char32_t code_point);

// Number of code points in a UTF-8 string.
std::size_t length(std::string_view utf8);

bool is_whitespace(char32_t c);

// BERT-style punctuation: every ASCII non-alphanumeric printable character
// plus anything in a Unicode P* general category.
bool is_punctuation(char32_t c);

bool is_ascii_digits(std::string_view s);

std::string nfc(std::string_view utf8);

// Trims and replaces every run of Unicode whitespace with a single space.
std::string collapse_whitespace(std::string_view utf8);

// Strips leading and trailing punctuation code points.
std::string strip_punctuation(std::string_view utf8);

std::vector<std::string> read_lines(const std::string& path);

}  // namespace recallner::text

#endif  // RECALLNER_TEXT_H_
