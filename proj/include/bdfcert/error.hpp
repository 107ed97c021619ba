#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bdfcert {

enum class ErrorCode {
    order_out_of_range,
    inconsistent_input,
    dimension_mismatch,
    infeasible,
    search_failed,
    domain_error,
    no_contraction,
    non_finite,
    incomplete_history,
    invalid_config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure path carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::order_out_of_range: return "order-out-of-range";
        case ErrorCode::inconsistent_input: return "inconsistent-input";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::infeasible: return "linear-system-infeasible";
        case ErrorCode::search_failed: return "search-failed";
        case ErrorCode::domain_error: return "domain-error";
        case ErrorCode::no_contraction: return "no-contraction-found";
        case ErrorCode::non_finite: return "non-finite-field";
        case ErrorCode::incomplete_history: return "history-incomplete";
        case ErrorCode::invalid_config: return "invalid-config";
    }
    return "unknown";
}

}  // namespace bdfcert
