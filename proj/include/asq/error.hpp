#pragma once

#include <stdexcept>
#include <string>

namespace asq {

// Invalid or out-of-domain parameters (bad distribution params, a < 1, ...).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed config files, unknown keys, bad CLI arguments.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (trace rows, schemas, short samples).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric failures: diverging integrals, non-convergent fits, truncation blowup.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct insufficient_data_error : data_error {
    using data_error::data_error;
};

// Always-on invariant check; throws instead of aborting so callers can report.
#define ASQ_CHECK(cond, msg)                                                   \
    do {                                                                       \
        if (!(cond)) throw ::asq::numeric_error(std::string("check failed: ") + (msg)); \
    } while (0)

}  // namespace asq
