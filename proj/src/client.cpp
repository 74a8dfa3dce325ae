#include "bestofn/client.hpp"

#include <cctype>
#include <cstdlib>
#include <random>
#include <thread>

#include "json.hpp"

#include "bestofn/error.hpp"
#include "bestofn/http.hpp"
#include "bestofn/judge_prompt.hpp"
#include "bestofn/log.hpp"

namespace bestofn {

using nlohmann::json;

const char* role_name(Role role) noexcept {
    switch (role) {
        case Role::generator: return "generator";
        case Role::logprob_scorer: return "logprob_scorer";
        case Role::reward_scorer: return "reward_scorer";
        case Role::judge: return "judge";
    }
    return "?";
}

Role role_from_name(const std::string& name) {
    if (name == "generator") return Role::generator;
    if (name == "logprob_scorer") return Role::logprob_scorer;
    if (name == "reward_scorer") return Role::reward_scorer;
    if (name == "judge") return Role::judge;
    raise(ErrorCode::invalid_argument, "unknown role '" + name + "'");
}

void BackendEndpoint::validate() const {
    const bool http = base_url.rfind("http://", 0) == 0;
    const bool https = base_url.rfind("https://", 0) == 0;
    if (!http && !https)
        raise(ErrorCode::invalid_argument, "base_url must be an absolute http/https URL, got '" + base_url + "'");
    if (timeout.count() <= 0) raise(ErrorCode::invalid_argument, "endpoint timeout must be positive");
    if (max_retries < 0) raise(ErrorCode::invalid_argument, "max_retries must be nonnegative");
}

namespace {

struct SplitUrl {
    std::string origin;       // scheme://host[:port], what httplib::Client takes
    std::string path_prefix;  // "" or "/something", prepended to routes
};

SplitUrl split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    const auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

std::string upper_snake(const char* s) {
    std::string out;
    for (const char* p = s; *p; ++p) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*p))));
    return out;
}

std::optional<std::string> effective_api_key(const BackendEndpoint& endpoint) {
    const std::string var = "BESTOFN_API_KEY_" + upper_snake(role_name(endpoint.role));
    if (const char* env = std::getenv(var.c_str()); env && *env) return std::string(env);
    return endpoint.api_key;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

void backoff_sleep(const BackendEndpoint& endpoint, int attempt) {
    // exponential with full jitter
    thread_local std::mt19937_64 rng{std::random_device{}()};
    const double ceiling =
        static_cast<double>(endpoint.backoff_initial.count()) * static_cast<double>(1u << std::min(attempt, 16));
    std::uniform_real_distribution<double> dist(0.0, ceiling);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(dist(rng)));
}

// POSTs a JSON body with retry on transport failures and HTTP 429/5xx.
// Other 4xx responses are refusals and surface immediately, body preserved.
json post_json(const BackendEndpoint& endpoint, const std::string& route, const json& body) {
    endpoint.validate();
    const SplitUrl url = split_base_url(endpoint.base_url);
    const std::string path = url.path_prefix + route;
    const std::string payload = body.dump();  // serialized once; retries resend identical bytes
    const auto key = effective_api_key(endpoint);

    LOG_DEBUG("POST " << endpoint.base_url << route << " body=" << payload
                      << (key ? " authorization=<redacted>" : ""));

    std::string last_failure;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        if (attempt > 0) backoff_sleep(endpoint, attempt - 1);

        httplib::Client cli(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
        const auto usecs =
            std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
        cli.set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        cli.set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        cli.set_write_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        httplib::Headers headers;
        if (key) headers.emplace("Authorization", "Bearer " + *key);

        auto res = cli.Post(path, headers, payload, "application/json");
        if (!res) {
            last_failure = "transport failure (" + httplib::to_string(res.error()) + ")";
            LOG_DEBUG("attempt " << attempt << " " << last_failure);
            continue;
        }
        if (res->status == 200) {
            json parsed = json::parse(res->body, nullptr, false);
            if (parsed.is_discarded())
                raise(ErrorCode::malformed_response, "response body is not valid JSON: " + res->body);
            LOG_DEBUG("response " << res->status << " body=" << res->body);
            return parsed;
        }
        if (retryable_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            LOG_DEBUG("attempt " << attempt << " " << last_failure);
            continue;
        }
        raise(ErrorCode::backend_refusal,
              "HTTP " + std::to_string(res->status) + " from " + route + ": " + res->body);
    }
    raise(ErrorCode::transport_error, route + " failed after " + std::to_string(endpoint.max_retries + 1) +
                                          " attempts; last: " + last_failure);
}

double require_finite_logprob(const json& value, const char* where) {
    if (!value.is_number())
        raise(ErrorCode::malformed_response, std::string(where) + ": logprob is not a number");
    const double lp = value.get<double>();
    if (!std::isfinite(lp))
        raise(ErrorCode::malformed_response, std::string(where) + ": logprob is not finite");
    if (lp > 0.0)
        raise(ErrorCode::malformed_response, std::string(where) + ": logprob is positive");
    return lp;
}

const json& dig(const json& node, const char* key, const char* where) {
    if (!node.is_object() || !node.contains(key))
        raise(ErrorCode::malformed_response, std::string(where) + ": missing field '" + key + "'");
    return node.at(key);
}

const json& first_choice(const json& response, const char* where) {
    const json& choices = dig(response, "choices", where);
    if (!choices.is_array() || choices.empty())
        raise(ErrorCode::malformed_response, std::string(where) + ": empty choices");
    return choices.at(0);
}

} // namespace

Candidate generate(const BackendEndpoint& endpoint, const GenerationRequest& request) {
    if (endpoint.role != Role::generator)
        raise(ErrorCode::invalid_argument, "generate requires a generator endpoint");
    request.params.validate();

    json body = {
        {"model", endpoint.model_name},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"max_tokens", request.params.max_tokens},
        {"logprobs", request.logprobs_requested},
    };
    const json response = post_json(endpoint, "/v1/chat/completions", body);

    const json& choice = first_choice(response, "chat.completions");
    const json& message = dig(choice, "message", "chat.completions");
    const json& content = dig(message, "content", "chat.completions");
    if (!content.is_string())
        raise(ErrorCode::malformed_response, "chat.completions: message content is not a string");

    Candidate candidate;
    candidate.text = content.get<std::string>();
    candidate.params = request.params;
    candidate.backend_model = endpoint.model_name;

    if (request.logprobs_requested && choice.contains("logprobs") && !choice.at("logprobs").is_null()) {
        const json& lp_content = dig(choice.at("logprobs"), "content", "chat.completions.logprobs");
        if (!lp_content.is_array())
            raise(ErrorCode::malformed_response, "chat.completions: logprobs.content is not an array");
        for (const json& entry : lp_content)
            candidate.token_logprobs.push_back(
                require_finite_logprob(dig(entry, "logprob", "chat.completions.logprobs"), "chat.completions"));
    }
    if (candidate.text.empty() && !candidate.token_logprobs.empty())
        raise(ErrorCode::malformed_response, "chat.completions: empty text with nonempty logprobs");
    return candidate;
}

std::vector<double> score_logprobs(const BackendEndpoint& endpoint, const std::string& text,
                                   const std::optional<std::string>& context) {
    if (endpoint.role != Role::logprob_scorer)
        raise(ErrorCode::invalid_argument, "score_logprobs requires a logprob_scorer endpoint");
    if (text.empty()) raise(ErrorCode::empty_text, "cannot score an empty text");

    const std::string full_prompt = (context ? *context : "") + text;
    json body = {
        {"model", endpoint.model_name},
        {"prompt", full_prompt},
        {"echo", true},
        {"max_tokens", 0},
        {"logprobs", 1},
    };
    const json response = post_json(endpoint, "/v1/completions", body);

    const json& choice = first_choice(response, "completions");
    const json& logprobs = dig(choice, "logprobs", "completions");
    const json& values = dig(logprobs, "token_logprobs", "completions");
    const json& offsets = dig(logprobs, "text_offset", "completions");
    if (!values.is_array() || !offsets.is_array() || values.size() != offsets.size())
        raise(ErrorCode::malformed_response, "completions: token_logprobs/text_offset shape mismatch");

    // keep only tokens starting at or after the context/text boundary
    const std::size_t boundary = context ? context->size() : 0;
    std::vector<double> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!offsets.at(i).is_number_integer())
            raise(ErrorCode::malformed_response, "completions: text_offset entry is not an integer");
        const auto offset = offsets.at(i).get<long long>();
        if (offset < 0 || static_cast<std::size_t>(offset) >= full_prompt.size() + 1)
            raise(ErrorCode::malformed_response, "completions: text_offset out of range");
        if (static_cast<std::size_t>(offset) < boundary) continue;
        out.push_back(require_finite_logprob(values.at(i), "completions"));
    }
    if (out.empty()) raise(ErrorCode::malformed_response, "completions: no tokens cover the scored text");
    return out;
}

double score_reward(const BackendEndpoint& endpoint, const std::string& prompt,
                    const std::string& response_text) {
    if (endpoint.role != Role::reward_scorer)
        raise(ErrorCode::invalid_argument, "score_reward requires a reward_scorer endpoint");

    json body = {
        {"model", endpoint.model_name},
        {"prompt", prompt},
        {"response", response_text},
    };
    const json response = post_json(endpoint, "/v1/score", body);

    const json& score = dig(response, "score", "score");
    if (!score.is_number())
        raise(ErrorCode::malformed_response, "score: payload is not numeric");
    const double value = score.get<double>();
    if (!std::isfinite(value)) raise(ErrorCode::malformed_response, "score: payload is not finite");
    return value;
}

JudgePass judge_once(const BackendEndpoint& endpoint, const std::string& prompt,
                     const std::string& response_first, const std::string& response_second) {
    if (endpoint.role != Role::judge)
        raise(ErrorCode::invalid_argument, "judge_once requires a judge endpoint");

    json body = {
        {"model", endpoint.model_name},
        {"messages",
         json::array({json{{"role", "user"},
                           {"content", render_judge_prompt(prompt, response_first, response_second)}}})},
        {"temperature", 0.0},
        {"top_p", 1.0},
        {"max_tokens", 1024},
        {"logprobs", false},
    };
    const json response = post_json(endpoint, "/v1/chat/completions", body);
    const json& choice = first_choice(response, "judge");
    const json& content = dig(dig(choice, "message", "judge"), "content", "judge");
    if (!content.is_string()) raise(ErrorCode::malformed_response, "judge: message content is not a string");
    return parse_verdict_marker(content.get<std::string>());
}

JudgePass parse_verdict_marker(const std::string& reply) {
    const std::pair<const char*, JudgePass> markers[] = {
        {"[[A]]", JudgePass::A}, {"[[B]]", JudgePass::B}, {"[[C]]", JudgePass::C}};
    std::size_t best_pos = std::string::npos;
    JudgePass best = JudgePass::unparseable;
    for (const auto& [marker, pass] : markers) {
        const auto pos = reply.rfind(marker);
        if (pos != std::string::npos && (best_pos == std::string::npos || pos > best_pos)) {
            best_pos = pos;
            best = pass;
        }
    }
    if (best == JudgePass::unparseable)
        raise(ErrorCode::unparseable_verdict, "judge reply carries no [[A]]/[[B]]/[[C]] marker");
    return best;
}

} // namespace bestofn
