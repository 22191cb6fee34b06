// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <string_view>

namespace expandir::uni {

// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD and
// consume one byte, so the function is total and never throws.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view cps);

// Lowercase mapping covering ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic letters. Other codepoints pass through unchanged.
char32_t to_lower(char32_t cp);

// Token character classification used by the tokenizer: ASCII alphanumerics
// and underscore (hashtags and mentions use \w semantics)
// plus letters from the common non-ASCII letter blocks (Latin-1 supplement
// through Latin Extended, combining diacritics, Greek, Cyrillic, and the
// larger letter planes). General punctuation, symbols and emoji are not
// token characters.
bool is_token_char(char32_t cp);

}  // namespace expandir::uni
