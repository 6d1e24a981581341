#pragma once

#include <stdexcept>
#include <string>

namespace ifsc {

// Process exit codes shared by the CLI and the error hierarchy below.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or configuration
  kExitData = 2,      // unreadable or invalid data/model files
  kExitTraining = 3,  // training diverged
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return kExitData; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitUsage; }
};

class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitData; }
};

class TrainError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitTraining; }
};

}  // namespace ifsc
