// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace expandir::log {

namespace {

Level level_from_env() {
    const char* env = std::getenv("EXPANDIR_LOG");
    if (env == nullptr) return Level::warn;
    if (std::strcmp(env, "error") == 0 || std::strcmp(env, "0") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0 || std::strcmp(env, "1") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0 || std::strcmp(env, "2") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "3") == 0) return Level::debug;
    return Level::warn;
}

std::atomic<Level>& level_ref() {
    static std::atomic<Level> lvl{level_from_env()};
    return lvl;
}

void emit(Level lvl, const char* tag, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(level())) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

Level level() { return level_ref().load(std::memory_order_relaxed); }
void set_level(Level lvl) { level_ref().store(lvl, std::memory_order_relaxed); }

void error(const std::string& msg) { emit(Level::error, "error", msg); }
void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace expandir::log
