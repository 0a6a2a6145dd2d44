#pragma once

#include <stdexcept>
#include <string>

namespace siopt {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tokenizer-level failure; carries the 1-based source line.
class LexError : public Error {
public:
    LexError(const std::string& what, int line)
        : Error("lex error (line " + std::to_string(line) + "): " + what), line_(line) {}
    int line() const { return line_; }
private:
    int line_ = 0;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
    ParseError(const std::string& what, int line)
        : Error("parse error (line " + std::to_string(line) + "): " + what), line_(line) {}
    int line() const { return line_; }
private:
    int line_ = 0;
};

// Cross-reference resolution failure (dangling OPTIMIZE/RESULTS/MODEL, ...).
class LinkError : public Error {
public:
    explicit LinkError(const std::string& what) : Error("link error: " + what) {}
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error("eval error: " + what) {}
};

class SimError : public Error {
public:
    explicit SimError(const std::string& what) : Error("simulation error: " + what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

} // namespace siopt
