#pragma once

#include <stdexcept>
#include <string>

namespace cecl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file content (PGM headers, raster truncation, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

// Structured-text parse failures (cascade XML, .eye files, config files);
// messages carry an element path or line number.
class ParseError : public Error {
public:
    using Error::Error;
};

// Invalid argument values (even kernel size, empty radius range, ...).
class ParamError : public Error {
public:
    using Error::Error;
};

// Rect or window outside the image it indexes.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Bad pipeline configuration: unreadable model, malformed region record.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace cecl
