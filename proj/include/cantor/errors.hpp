#pragma once

#include <stdexcept>
#include <string>

namespace cantor {

// Malformed input: bad words, bad files, chains that fail validation.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A depth, memory, word-count or group-order budget was exceeded.
class ResourceError : public std::runtime_error {
public:
    ResourceError(std::string budget, const std::string& what)
        : std::runtime_error(what), budget_(std::move(budget)) {}

    const std::string& budget() const noexcept { return budget_; }

private:
    std::string budget_;
};

} // namespace cantor
