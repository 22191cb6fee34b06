// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <string_view>

namespace expandir {

// Snowball French stemming algorithm (the "Porter" truncation for French).
// Input is expected to be a lowercased UTF-8 token; the result matches the
// published reference implementation byte for byte. Total function: tokens
// that the algorithm does not recognise come back unchanged.
std::string stem_french(std::string_view word);

}  // namespace expandir
