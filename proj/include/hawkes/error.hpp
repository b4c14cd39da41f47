#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or input-data violation.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Neither decomposition level nor the exponential baseline gave a usable model.
class NoStationaryModel : public Error {
public:
    using Error::Error;
};

class DegenerateSpectrum : public Error {
public:
    using Error::Error;
};

}  // namespace hawkes
