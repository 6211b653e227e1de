#pragma once

#include <stdexcept>
#include <string>

namespace usv {

/// Invalid parameters or scenario files. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf or runaway values detected while stepping a model.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObserverDivergence : public NumericalError {
 public:
  ObserverDivergence(std::string channel, const std::string& what)
      : NumericalError(what), channel_(std::move(channel)) {}

  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

}  // namespace usv
