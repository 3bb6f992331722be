#ifndef CCFSYNC_ERRORS_HPP
#define CCFSYNC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccfsync {

// Multiplicity outside [1, 2^c - 1] for the configured counter width.
class counter_range_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Adding to an existing counter would exceed 2^c - 1. Distinct from a
// range error on the argument: the stored state, not the input, is at fault.
class counter_overflow_error : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Two filters that must share parameters and seed do not.
class param_mismatch_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class parse_error : public std::runtime_error {
public:
    enum class kind {
        bad_magic,
        bad_version,
        truncated,
        bad_params,
        bad_slot,
    };

    parse_error(kind k, const std::string& what)
        : std::runtime_error(what), kind_(k) {}

    kind which() const { return kind_; }

private:
    kind kind_;
};

class transport_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class sync_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ccfsync

#endif  // CCFSYNC_ERRORS_HPP
