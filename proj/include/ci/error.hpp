#pragma once

#include <stdexcept>
#include <string>

namespace ci {

// Base class for everything the engine can throw.  `stage` names the
// pipeline step that failed so the CLI can report "model X failed at Y".
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error("model", what) {}
};

class UnsupportedBasisError : public Error {
 public:
  explicit UnsupportedBasisError(const std::string& what)
      : Error("time-basis", what) {}
};

class DerivationError : public Error {
 public:
  DerivationError(const std::string& stage, const std::string& what)
      : Error(stage, what) {}
};

class RegularizationError : public Error {
 public:
  explicit RegularizationError(const std::string& what)
      : Error("eta-limit", what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("numeric", what) {}
};

}  // namespace ci
