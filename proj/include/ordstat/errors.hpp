#pragma once

#include <stdexcept>
#include <string>

namespace ordstat {

// Base of every error thrown by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotPrimePower : public Error {
public:
    explicit NotPrimePower(unsigned n)
        : Error("not a prime power: " + std::to_string(n)), n_(n) {}
    unsigned value() const noexcept { return n_; }

private:
    unsigned n_;
};

class ZeroInverse : public Error {
public:
    ZeroInverse() : Error("zero has no multiplicative inverse") {}
};

class DomainTooLarge : public Error {
public:
    using Error::Error;
};

class ImplicitFamily : public Error {
public:
    ImplicitFamily()
        : Error("operation needs an explicitly enumerable map family") {}
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DegenerateQuantile : public Error {
public:
    DegenerateQuantile() : Error("quantile function integrates to zero") {}
};

class NotInBall : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace ordstat
