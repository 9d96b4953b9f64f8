#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bioref {

/// Invalid parameters or configuration. Carries every offending item so a
/// schema check can report all problems at once.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg), issues_{msg} {}
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

/// A state left the region where a model is defined (e.g. the X-shape
/// linkage can no longer close).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced during simulation. `channel` names the signal.
class FaultError : public std::runtime_error {
public:
    FaultError(std::string channel, const std::string& msg)
        : std::runtime_error(msg), channel_(std::move(channel)) {}
    const std::string& channel() const noexcept { return channel_; }

private:
    std::string channel_;
};

}  // namespace bioref
