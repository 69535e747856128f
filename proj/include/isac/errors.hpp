// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ISAC_ERRORS_HPP
#define ISAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isac
{

// Bad argument value (out-of-range scalar, wrong count).
class InvalidParameter : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed matrix input: shape mismatch, non-finite entries, not Hermitian / PSD.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Every eigenvalue is zero, so no power allocation can produce any gain.
class NoFeasibleGain : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A transmit matrix with orthonormal per-subcarrier columns cannot exist (N_x < N_t).
class InfeasibleShape : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical solver did not converge. The message carries the diagnostics.
class SolverFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace isac

#endif
