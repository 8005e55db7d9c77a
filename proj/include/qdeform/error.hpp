#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qdeform
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Grammar violation while parsing an expression.
class ParseError : public Error
{
public:
    ParseError(std::string message, std::size_t offset, std::vector<std::string> expected);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class EvalError : public Error
{
public:
    enum class Kind { UnboundParameter, DivisionByZero, Domain, NonFinite };

    EvalError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// A point lies outside the region where the requested object exists
/// (e.g. |z|^2 >= R_f for a coherent state).
class DomainError : public Error
{
public:
    using Error::Error;
};

class ConvergenceError : public Error
{
public:
    using Error::Error;
};

class OverflowError : public Error
{
public:
    using Error::Error;
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

/// Raised by the closed-form structure function when some F(k) vanishes.
class ClosedFormInapplicable : public Error
{
public:
    explicit ClosedFormInapplicable(int k);

    int k() const noexcept { return k_; }

private:
    int k_;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace qdeform
