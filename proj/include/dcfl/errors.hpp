#pragma once

#include <stdexcept>
#include <string>

namespace dcfl {

// Shape or length disagreement between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of an operation (bad counts, bad simplex, empty sets).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NaN or Inf produced or consumed where finite values are required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed external file.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation invoked in a state that does not permit it.
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// Invalid configuration; the message names the offending key.
struct ConfigError : std::invalid_argument {
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace dcfl
