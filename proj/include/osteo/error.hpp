#pragma once

#include <stdexcept>
#include <string>

namespace osteo {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: wrong shape, malformed file, inconsistent dataset.
class DataError : public Error {
public:
    using Error::Error;
};

/// Tensor or image dimensions that do not fit the operation.
class ShapeError : public DataError {
public:
    using DataError::DataError;
};

/// A numeric failure such as a non-finite loss.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace osteo
