#ifndef AIRA_ERRORS_HPP
#define AIRA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aira {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingDataError : public Error {
public:
    MissingDataError(const std::string& what, std::size_t row)
        : Error(what), row_(row) {}
    /// Zero-based data row (header excluded) holding the empty cell.
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ParseError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class ModelFormatError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class DecompositionError : public Error { using Error::Error; };
class BootstrapUnavailableError : public Error { using Error::Error; };

} // namespace aira

#endif // AIRA_ERRORS_HPP
