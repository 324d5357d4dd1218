#pragma once

#include <stdexcept>
#include <string>

namespace cutkit {

// Domain error with a stable machine-readable code alongside the message.
// Codes surface in tool result envelopes and in evaluator reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace cutkit
