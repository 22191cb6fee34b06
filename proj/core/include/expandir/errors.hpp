// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#pragma once

#include <stdexcept>
#include <string>

namespace expandir {

/// Error raised while reading external data (documents, topics, vectors,
/// runs, qrels, configs). Carries enough context to point the user at the
/// offending file and line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    ParseError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)), line_(0) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }  // 0 when not line-addressable

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace expandir
