#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Bad user-supplied value (geometry, wavelength, counts, config field).
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Kinematically impossible request, e.g. arcsin argument outside [-1, 1].
class UnphysicalKinematics : public std::domain_error {
public:
    explicit UnphysicalKinematics(const std::string& what) : std::domain_error(what) {}
};

// CSV/JSON input that cannot be parsed; carries a 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

} // namespace biphoton
