#pragma once

#include <stdexcept>
#include <string>

namespace cpnet {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad JSON, wrong outcome length, an invalid
// net handed to an operation that requires a valid one, and so on.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class CycleDetected : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// The instance is well formed but exceeds a configured resource bound.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

class StateBudgetExceeded : public ResourceLimit {
public:
    explicit StateBudgetExceeded(std::size_t budget)
        : ResourceLimit("state budget exceeded: more than " + std::to_string(budget) +
                        " outcomes visited"),
          budget_(budget) {}

    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

class InstanceTooLarge : public ResourceLimit {
public:
    using ResourceLimit::ResourceLimit;
};

}  // namespace cpnet
