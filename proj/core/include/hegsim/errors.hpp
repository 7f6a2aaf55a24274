#pragma once

#include <stdexcept>
#include <string>

namespace hegsim {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-finite values or an unstable integration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The optimizer found no feasible pulse anywhere on its search grid.
class NoFeasiblePointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hegsim
