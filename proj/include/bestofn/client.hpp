#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/types.hpp"

namespace bestofn {

enum class Role { generator, logprob_scorer, reward_scorer, judge };

const char* role_name(Role role) noexcept;
Role role_from_name(const std::string& name);

// One backend the harness talks to. The API key can be overridden per role
// via BESTOFN_API_KEY_<ROLE> (e.g. BESTOFN_API_KEY_JUDGE).
struct BackendEndpoint {
    Role role = Role::generator;
    std::string base_url;  // absolute http/https URL, optional path prefix
    std::string model_name;
    std::optional<std::string> api_key;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    std::chrono::milliseconds backoff_initial{500};  // doubles per retry, full jitter

    void validate() const;
};

struct GenerationRequest {
    std::string prompt;
    SamplingParams params;
    bool logprobs_requested = true;
};

// POST {base_url}/v1/chat/completions. Returns a Candidate whose pool index
// is unset (0); the orchestrator assigns indices by dispatch order.
// token_logprobs is populated iff requested and supplied by the backend.
Candidate generate(const BackendEndpoint& endpoint, const GenerationRequest& request);

// POST {base_url}/v1/completions with echo scoring (prompt = context + text,
// max_tokens = 0, logprobs = 1). Returns one natural-log probability per
// token of `text`; context tokens are sliced off by byte-offset alignment.
std::vector<double> score_logprobs(const BackendEndpoint& endpoint, const std::string& text,
                                   const std::optional<std::string>& context = std::nullopt);

// POST {base_url}/v1/score with {model, prompt, response} -> {score}.
double score_reward(const BackendEndpoint& endpoint, const std::string& prompt,
                    const std::string& response);

// One pairwise judging pass: renders the fixed template, sends it as a chat
// completion, and parses the final verdict marker. A = first response
// better, B = second, C = tie. Throws UnparseableVerdict when no marker
// is found; tie policy for that case lives at the aggregation layer.
JudgePass judge_once(const BackendEndpoint& endpoint, const std::string& prompt,
                     const std::string& response_first, const std::string& response_second);

// Recognizes exactly [[A]]/[[B]]/[[C]], taking the last occurrence.
JudgePass parse_verdict_marker(const std::string& reply);

} // namespace bestofn
