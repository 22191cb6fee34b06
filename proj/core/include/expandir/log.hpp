// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>

namespace expandir::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Process-wide verbosity, initialised once from the EXPANDIR_LOG environment
// variable (error|warn|info|debug, default warn). All output goes to stderr
// so machine-readable stdout stays clean.
Level level();
void set_level(Level lvl);

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace expandir::log
