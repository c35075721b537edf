#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bnsjump {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class IncompatibleGrid : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NumericOverflow : public Error {
public:
    using Error::Error;
};

class OrderingError : public Error {
public:
    using Error::Error;
};

/// Malformed input; carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An internal consistency check failed (a property the toolkit asserts about its own output).
class AssertionFailure : public Error {
public:
    using Error::Error;
};

/// Independent RNG streams used by the simulators; each gets its own derived seed.
enum class Stream : std::uint64_t {
    base_subordinator = 1,
    strong_subordinator = 2,
    brownian = 3,
    noise = 4,
    classifier = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for item `index` of stream `stream` under `master`. Pure function of its arguments,
/// so any partition of an ensemble over threads draws identical numbers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, Stream stream) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t salt) noexcept;

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
/// Work is split in contiguous blocks; the first exception is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Shortest round-trip decimal representation (locale independent).
std::string format_double(double v);

/// Parses a full-string double; throws ParseError on garbage.
double parse_double(std::string_view text, std::size_t line = 0);
long long parse_int(std::string_view text, std::size_t line = 0);

std::string_view trim(std::string_view s) noexcept;

}  // namespace bnsjump
