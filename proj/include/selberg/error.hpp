#pragma once

#include <stdexcept>
#include <string>

namespace selberg {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A module precondition or postcondition does not hold.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(what) {}
};

class DomainError : public ContractError {
public:
    explicit DomainError(const std::string& what) : ContractError(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& what) : Error(what) {}
};

// A truncated series or sum whose tail estimate is above the requested tolerance.
class TailTooLarge : public ContractError {
public:
    TailTooLarge(const std::string& what, double tail) : ContractError(what), tail_(tail) {}
    double tail() const { return tail_; }

private:
    double tail_;
};

}  // namespace selberg
