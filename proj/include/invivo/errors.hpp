#pragma once

#include <stdexcept>
#include <string>

namespace invivo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated (bad index, non-finite input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Zero-forcing was asked to invert a (numerically) singular channel.
class SingularChannelError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ChannelFileError : public Error {
 public:
  enum class Kind { MissingFile, MalformedHeader, MalformedRow, WrongRowCount, NonFinite, Io };

  ChannelFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}

}  // namespace detail
}  // namespace invivo
