#pragma once

#include <stdexcept>
#include <string>

namespace inloop {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain an operation is defined on.
class DomainError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class AnalysisError : public Error
{
public:
  using Error::Error;
};

/// Interpolation was requested outside the sampled range of a curve.
class OutOfHullError : public AnalysisError
{
public:
  using AnalysisError::AnalysisError;
};

} // namespace inloop
