#pragma once

#include <stdexcept>
#include <string>

namespace eftcot {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or incomplete configuration (bad paths, unknown endpoint ids, bad bounds).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File system failures and malformed input files.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace eftcot
