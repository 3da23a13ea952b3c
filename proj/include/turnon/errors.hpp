#pragma once

#include <stdexcept>
#include <string>

namespace turnon {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent device data, config files or schema keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Out-of-domain or non-finite arguments to an operation.
class InputError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_time)
        : Error(what), last_time_(last_time) {}

    [[nodiscard]] double last_time() const { return last_time_; }

private:
    double last_time_;
};

class EventError : public Error {
public:
    using Error::Error;
};

/// No qualifying threshold crossing in a trace.
class NotSwitchedError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

}  // namespace turnon
