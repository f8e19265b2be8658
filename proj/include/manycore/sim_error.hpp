// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace manycore {

// Invalid build-time parameters: bad widths, malformed topologies, bad plans.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A protocol rule was broken at runtime (mis-built fabric or a node that
// violates the endpoint contract). Carries the cycle once known.
class ProtocolViolation : public std::runtime_error {
public:
    explicit ProtocolViolation(const std::string& what) : std::runtime_error(what) {}

    void set_cycle(uint64_t cycle) {
        if (!cycle_) cycle_ = cycle;
    }
    std::optional<uint64_t> cycle() const { return cycle_; }

    std::string describe() const {
        std::ostringstream os;
        if (cycle_) os << "cycle " << *cycle_ << ": ";
        os << what();
        return os.str();
    }

private:
    std::optional<uint64_t> cycle_;
};

namespace detail {
inline void format_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    format_into(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string cat(const Args&... args) {
    std::ostringstream os;
    detail::format_into(os, args...);
    return os.str();
}

template <typename... Args>
[[noreturn]] void fail_config(const Args&... args) {
    throw ConfigError(cat(args...));
}

template <typename... Args>
[[noreturn]] void fail_protocol(const Args&... args) {
    throw ProtocolViolation(cat(args...));
}

}  // namespace manycore
