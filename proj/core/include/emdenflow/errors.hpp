#pragma once

#include <stdexcept>
#include <string>

namespace emdenflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error { using Error::Error; };
class RegimeUndefined : public Error { using Error::Error; };
class RegimeMismatch : public Error { using Error::Error; };
class NotAnEquilibrium : public Error { using Error::Error; };
class NotACenterCandidate : public Error { using Error::Error; };
class NotASaddle : public Error { using Error::Error; };
class BadK : public Error { using Error::Error; };
class StepUnderflow : public Error { using Error::Error; };
class NoCycleFound : public Error { using Error::Error; };
class TransformInvalid : public Error { using Error::Error; };
class UndeterminedTrajectory : public Error { using Error::Error; };

}  // namespace emdenflow
