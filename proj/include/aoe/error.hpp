#pragma once

#include <stdexcept>
#include <string>

namespace aoe {

// Every failure surfaced by the library derives from aoe::error. The
// category() string is what the CLI reports and maps onto an exit code.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept = 0;
};

class config_error : public error {
public:
  using error::error;
  const char* category() const noexcept override { return "config"; }
};

// Malformed scenario document (not JSON, wrong types, unknown schema).
class parse_error : public error {
public:
  using error::error;
  const char* category() const noexcept override { return "scenario"; }
};

// Well-formed scenario that violates a type invariant.
class validation_error : public error {
public:
  using error::error;
  const char* category() const noexcept override { return "scenario"; }
};

class compute_error : public error {
public:
  using error::error;
  const char* category() const noexcept override { return "compute"; }
};

class io_error : public error {
public:
  using error::error;
  const char* category() const noexcept override { return "I/O"; }
};

}  // namespace aoe
