#include "bestofn/error.hpp"

namespace bestofn {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::empty_verdict_set: return "EmptyVerdictSet";
        case ErrorCode::unknown_prompt_id: return "UnknownPromptId";
        case ErrorCode::empty_pool: return "EmptyPool";
        case ErrorCode::mixed_score_kinds: return "MixedScoreKinds";
        case ErrorCode::insufficient_pool: return "InsufficientPool";
        case ErrorCode::transport_error: return "TransportError";
        case ErrorCode::backend_refusal: return "BackendRefusal";
        case ErrorCode::malformed_response: return "MalformedResponse";
        case ErrorCode::empty_text: return "EmptyText";
        case ErrorCode::unparseable_verdict: return "UnparseableVerdict";
        case ErrorCode::empty_token_sequence: return "EmptyTokenSequence";
        case ErrorCode::non_finite_logprob: return "NonFiniteLogprob";
        case ErrorCode::positive_logprob: return "PositiveLogprob";
        case ErrorCode::empty_candidate: return "EmptyCandidate";
        case ErrorCode::all_candidates_failed: return "AllCandidatesFailed";
        case ErrorCode::pool_incomplete: return "PoolIncomplete";
        case ErrorCode::missing_baseline: return "MissingBaseline";
        case ErrorCode::missing_prompt: return "MissingPrompt";
        case ErrorCode::insufficient_draws: return "InsufficientDraws";
        case ErrorCode::empty_report: return "EmptyReport";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::store_mismatch: return "StoreMismatch";
        case ErrorCode::invalid_model: return "InvalidModel";
        case ErrorCode::port_in_use: return "PortInUse";
    }
    return "UnknownError";
}

} // namespace bestofn
