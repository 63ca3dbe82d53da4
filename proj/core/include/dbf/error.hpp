/*
   Copyright 2026 The dbf Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace dbf {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value is missing, malformed or out of range.
/// `field()` names the offending parameter when one can be identified.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message)
        : Error(field.empty() ? message : field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested model exceeds a hard size limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A channel coefficient is exactly zero where a nonzero one is required.
class DegenerateChannelError : public Error {
public:
    using Error::Error;
};

/// Operation invoked before its inputs exist (e.g. missing trained weights).
class StateError : public Error {
public:
    using Error::Error;
};

/// The chosen reverse-aligned fraction makes k1 <= k2.
class InfeasibleEpsilonError : public Error {
public:
    using Error::Error;
};

/// A result file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace dbf
