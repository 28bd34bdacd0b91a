#pragma once

#include <stdexcept>
#include <string>

namespace kr {

// Every library failure carries a stable code so the CLI can map it to an
// exit status and tests can match on it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Malformed user input (term syntax, field JSON, parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

// A construction or verification contract was broken.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace kr
