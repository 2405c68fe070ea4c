// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pnc {

enum class ErrorCode {
    validation,            // bad argument / malformed configuration
    truncation_too_severe, // closed-form tail mass beyond n_cut exceeds tolerance
    zero_mean_source,
    empty_stream,
    insufficient_counts,   // a coincidence count needed for sigma is zero
    infeasible,            // LP infeasible -> calibration alarm
    degenerate_denominator,
    domain,                // argument outside mathematical domain
    parse,                 // malformed record file
    io,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string msg)
        : std::runtime_error(std::move(msg)), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace pnc
