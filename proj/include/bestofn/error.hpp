#pragma once

#include <stdexcept>
#include <string>

namespace bestofn {

// Every failure mode the library reports. One exception type carrying a code
// keeps call sites uniform and lets tests assert on the exact failure class.
enum class ErrorCode {
    invalid_argument,

    // domain-core
    empty_verdict_set,
    unknown_prompt_id,
    empty_pool,
    mixed_score_kinds,
    insufficient_pool,

    // inference-client
    transport_error,
    backend_refusal,
    malformed_response,
    empty_text,
    unparseable_verdict,

    // verifier
    empty_token_sequence,
    non_finite_logprob,
    positive_logprob,
    empty_candidate,
    all_candidates_failed,

    // orchestrator
    pool_incomplete,

    // judge-eval
    missing_baseline,
    missing_prompt,

    // experiment
    insufficient_draws,
    empty_report,
    io_error,
    store_mismatch,

    // selection-sim
    invalid_model,

    // mock-backend
    port_in_use,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace bestofn
