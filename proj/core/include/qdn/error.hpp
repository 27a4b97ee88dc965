// Copyright 2026 The qdenoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qdn {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes do not follow the expected file format (bad magic, bad header).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload shorter than its header promises.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Tensor, image or matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (probability > 1, zero norm, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure or a referenced file that cannot be resolved.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdn
