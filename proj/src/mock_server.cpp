#include "bestofn/mock_server.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "json.hpp"

#include "bestofn/error.hpp"
#include "bestofn/hash.hpp"
#include "bestofn/http.hpp"
#include "bestofn/log.hpp"

namespace bestofn {

using nlohmann::json;

JudgePolicy judge_policy_from_name(const std::string& name) {
    if (name == "prefer_quality_table") return JudgePolicy::prefer_quality_table;
    if (name == "always_A") return JudgePolicy::always_A;
    if (name == "always_B") return JudgePolicy::always_B;
    if (name == "always_tie") return JudgePolicy::always_tie;
    if (name == "position_biased") return JudgePolicy::position_biased;
    if (name == "emit_garbage") return JudgePolicy::emit_garbage;
    raise(ErrorCode::invalid_argument, "unknown judge policy '" + name + "'");
}

FaultKind fault_kind_from_name(const std::string& name) {
    if (name == "http500") return FaultKind::http500;
    if (name == "timeout") return FaultKind::timeout;
    if (name == "malformed") return FaultKind::malformed;
    raise(ErrorCode::invalid_argument, "unknown fault kind '" + name + "'");
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    return z ^ (z >> 31);
}

// Byte offsets at which UTF-8 codepoints start, plus the end offset.
std::vector<std::size_t> codepoint_offsets(const std::string& text) {
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) offsets.push_back(i);
    }
    offsets.push_back(text.size());
    return offsets;
}

double default_token_logprob(std::uint64_t text_hash, std::size_t position, std::uint64_t salt) {
    return -0.001 - static_cast<double>(mix(text_hash ^ salt, position) % 3000) / 1000.0;
}

} // namespace

double MockScript::default_quality(const std::string& text, std::uint64_t salt) {
    const std::uint64_t h = mix(fnv1a64(text), salt ^ 0x71ee2u);
    return static_cast<double>(h % 1000000ull) / 999999.0;
}

GenerationEntry MockScript::default_generation(const std::string& prompt, int ordinal,
                                               std::uint64_t salt) {
    const std::uint64_t h = mix(fnv1a64(prompt), salt);
    GenerationEntry entry;
    entry.text = "gen-" + to_hex(h).substr(0, 8) + "-" + std::to_string(ordinal);
    const std::uint64_t th = fnv1a64(entry.text);
    const std::size_t tokens = 3 + (mix(th, 0x70ull) % 6);
    for (std::size_t i = 0; i < tokens; ++i)
        entry.token_logprobs.push_back(default_token_logprob(th, i, salt));
    return entry;
}

double MockScript::quality_of(const std::string& text) const {
    auto it = quality_table.find(text);
    if (it != quality_table.end()) return it->second;
    return default_quality(text, salt);
}

MockScript load_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) raise(ErrorCode::io_error, "cannot open mock script " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::io_error, "mock script " + path.string() + " is not valid JSON");

    MockScript script;
    if (j.contains("judge_policy")) script.judge_policy = judge_policy_from_name(j.at("judge_policy"));
    if (j.contains("quality_table"))
        for (const auto& [text, q] : j.at("quality_table").items())
            script.quality_table[text] = q.get<double>();
    if (j.contains("generations"))
        for (const json& g : j.at("generations")) {
            GenerationEntry entry{g.at("text").get<std::string>(),
                                  g.value("logprobs", std::vector<double>{})};
            script.generations[{g.at("prompt").get<std::string>(), g.at("ordinal").get<int>()}] =
                std::move(entry);
        }
    if (j.contains("rewards"))
        for (const json& r : j.at("rewards")) {
            double score = std::numeric_limits<double>::quiet_NaN();
            if (r.at("score").is_number()) score = r.at("score").get<double>();
            script.rewards[{r.at("prompt").get<std::string>(), r.at("response").get<std::string>()}] = score;
        }
    if (j.contains("logprob_texts"))
        for (const json& t : j.at("logprob_texts"))
            script.logprob_texts[t.at("text").get<std::string>()] =
                t.at("logprobs").get<std::vector<double>>();
    if (j.contains("faults"))
        for (const json& f : j.at("faults"))
            script.faults[f.at("ordinal").get<int>()] = fault_kind_from_name(f.at("fault"));
    script.response_delay = std::chrono::milliseconds(j.value("response_delay_ms", 0));
    script.random_delay_max = std::chrono::milliseconds(j.value("random_delay_max_ms", 0));
    script.timeout_fault_sleep = std::chrono::milliseconds(j.value("timeout_fault_sleep_ms", 1500));
    script.salt = j.value("salt", std::uint64_t{0});
    return script;
}

struct MockServer::Impl {
    MockScript script;
    httplib::Server server;
    std::thread listener;
    int port = 0;

    std::mutex mu;
    std::vector<TranscriptEntry> requests;
    std::map<std::string, int> prompt_ordinals;
    int in_flight = 0;
    int max_concurrency = 0;
    std::mt19937_64 delay_rng{0x5eedull};
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    // ---- bookkeeping ----------------------------------------------------

    struct HandlerGuard {
        Impl* impl;
        explicit HandlerGuard(Impl* i) : impl(i) {
            std::lock_guard<std::mutex> lock(impl->mu);
            impl->in_flight++;
            impl->max_concurrency = std::max(impl->max_concurrency, impl->in_flight);
        }
        ~HandlerGuard() {
            std::lock_guard<std::mutex> lock(impl->mu);
            impl->in_flight--;
        }
    };

    int record(const std::string& route, const std::string& prompt, int prompt_ordinal,
               const std::string& body) {
        std::lock_guard<std::mutex> lock(mu);
        TranscriptEntry entry;
        entry.ordinal = static_cast<int>(requests.size());
        entry.route = route;
        entry.prompt = prompt;
        entry.prompt_ordinal = prompt_ordinal;
        entry.timestamp_us = std::chrono::duration_cast<std::chrono::microseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        entry.body = body;
        requests.push_back(entry);
        return entry.ordinal;
    }

    int next_prompt_ordinal(const std::string& prompt) {
        std::lock_guard<std::mutex> lock(mu);
        return prompt_ordinals[prompt]++;
    }

    void apply_delays() {
        if (script.response_delay.count() > 0) std::this_thread::sleep_for(script.response_delay);
        if (script.random_delay_max.count() > 0) {
            std::uint64_t draw;
            {
                std::lock_guard<std::mutex> lock(mu);
                draw = delay_rng();
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(
                draw % static_cast<std::uint64_t>(script.random_delay_max.count() + 1)));
        }
    }

    // Returns true when the fault plan fully handled the response.
    bool apply_fault(int ordinal, httplib::Response& res) {
        auto it = script.faults.find(ordinal);
        if (it == script.faults.end()) return false;
        switch (it->second) {
            case FaultKind::http500:
                res.status = 500;
                res.set_content("{\"error\":\"scripted internal error\"}", "application/json");
                return true;
            case FaultKind::timeout:
                std::this_thread::sleep_for(script.timeout_fault_sleep);
                return false;  // reply normally; the client has long since given up
            case FaultKind::malformed:
                res.status = 200;
                res.set_content("{not json", "application/json");
                return true;
        }
        return false;
    }

    // ---- schema pinning --------------------------------------------------

    static bool reject(httplib::Response& res, const std::string& message) {
        res.status = 400;
        res.set_content(json{{"error", message}}.dump(), "application/json");
        return false;
    }

    static bool check_schema(const json& body, const std::set<std::string>& required,
                             const std::set<std::string>& optional, httplib::Response& res) {
        if (!body.is_object()) return reject(res, "body is not a JSON object");
        for (const auto& [key, _] : body.items()) {
            if (!required.count(key) && !optional.count(key)) return reject(res, "unknown field: " + key);
        }
        for (const std::string& key : required) {
            if (!body.contains(key)) return reject(res, "missing field: " + key);
        }
        return true;
    }

    static bool parse_single_user_message(const json& body, std::string& content,
                                          httplib::Response& res) {
        const json& messages = body.at("messages");
        if (!messages.is_array() || messages.size() != 1)
            return reject(res, "messages must hold exactly one message");
        const json& msg = messages.at(0);
        if (!check_schema(msg, {"role", "content"}, {}, res)) return false;
        if (msg.at("role") != "user") return reject(res, "message role must be user");
        if (!msg.at("content").is_string()) return reject(res, "message content must be a string");
        content = msg.at("content").get<std::string>();
        return true;
    }

    // ---- judge prompt dissection ------------------------------------------

    struct JudgeRequest {
        std::string question, first, second;
    };

    static bool looks_like_judge_prompt(const std::string& content) {
        return content.find("\n[Question]\n") != std::string::npos &&
               content.find("\n[Response A]\n") != std::string::npos &&
               content.find("\n[Response B]\n") != std::string::npos;
    }

    static bool slice_judge_prompt(const std::string& content, JudgeRequest& out) {
        const std::string q_mark = "\n[Question]\n";
        const std::string a_mark = "\n\n[Response A]\n";
        const std::string b_mark = "\n\n[Response B]\n";
        const std::string end_mark = "\n\nCompare both responses";
        const auto q = content.find(q_mark);
        if (q == std::string::npos) return false;
        const auto a = content.find(a_mark, q);
        if (a == std::string::npos) return false;
        const auto b = content.find(b_mark, a + a_mark.size());
        if (b == std::string::npos) return false;
        const auto end = content.find(end_mark, b + b_mark.size());
        if (end == std::string::npos) return false;
        out.question = content.substr(q + q_mark.size(), a - q - q_mark.size());
        out.first = content.substr(a + a_mark.size(), b - a - a_mark.size());
        out.second = content.substr(b + b_mark.size(), end - b - b_mark.size());
        return true;
    }

    std::string judge_reply(const JudgeRequest& request) const {
        switch (script.judge_policy) {
            case JudgePolicy::always_A:
            case JudgePolicy::position_biased:
                return "The first response reads better to me. [[A]]";
            case JudgePolicy::always_B:
                return "The second response reads better to me. [[B]]";
            case JudgePolicy::always_tie:
                return "Both responses are of comparable quality. [[C]]";
            case JudgePolicy::emit_garbage:
                return "I am unable to pick a better response here.";
            case JudgePolicy::prefer_quality_table: {
                const double qa = script.quality_of(request.first);
                const double qb = script.quality_of(request.second);
                if (qa > qb) return "Weighed both answers against the question. [[A]]";
                if (qb > qa) return "Weighed both answers against the question. [[B]]";
                return "Weighed both answers against the question. [[C]]";
            }
        }
        return "[[C]]";
    }

    // ---- route handlers ---------------------------------------------------

    void handle_chat(const httplib::Request& req, httplib::Response& res) {
        HandlerGuard guard(this);
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            reject(res, "request body is not JSON");
            return;
        }
        if (!check_schema(body, {"model", "messages", "temperature", "top_p", "max_tokens", "logprobs"},
                          {}, res))
            return;
        std::string content;
        if (!parse_single_user_message(body, content, res)) return;

        const bool is_judge = looks_like_judge_prompt(content);
        std::string reply_text;
        std::vector<double> logprobs;
        int ordinal;

        if (is_judge) {
            JudgeRequest jr;
            if (!slice_judge_prompt(content, jr)) {
                reject(res, "judge prompt does not match the fixed template");
                return;
            }
            ordinal = record("judge", jr.question, -1, req.body);
            reply_text = judge_reply(jr);
        } else {
            const int prompt_ordinal = next_prompt_ordinal(content);
            ordinal = record("chat", content, prompt_ordinal, req.body);
            auto it = script.generations.find({content, prompt_ordinal});
            GenerationEntry entry = it != script.generations.end()
                                        ? it->second
                                        : MockScript::default_generation(content, prompt_ordinal, script.salt);
            reply_text = entry.text;
            logprobs = entry.token_logprobs;
        }

        apply_delays();
        if (apply_fault(ordinal, res)) return;

        json choice = {
            {"index", 0},
            {"message", json{{"role", "assistant"}, {"content", reply_text}}},
            {"finish_reason", "stop"},
        };
        const bool want_logprobs = body.at("logprobs").is_boolean() && body.at("logprobs").get<bool>();
        if (want_logprobs && !logprobs.empty()) {
            json entries = json::array();
            for (std::size_t i = 0; i < logprobs.size(); ++i)
                entries.push_back(json{{"token", "t" + std::to_string(i)}, {"logprob", logprobs[i]}});
            choice["logprobs"] = json{{"content", entries}};
        } else {
            choice["logprobs"] = nullptr;
        }
        json out = {
            {"id", "mock-chat"},
            {"object", "chat.completion"},
            {"model", body.at("model")},
            {"choices", json::array({choice})},
        };
        res.set_content(out.dump(), "application/json");
    }

    void handle_completions(const httplib::Request& req, httplib::Response& res) {
        HandlerGuard guard(this);
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            reject(res, "request body is not JSON");
            return;
        }
        if (!check_schema(body, {"model", "prompt", "echo", "max_tokens", "logprobs"}, {}, res)) return;
        if (body.at("echo") != true || body.at("max_tokens") != 0 || body.at("logprobs") != 1) {
            reject(res, "echo scoring requires echo=true, max_tokens=0, logprobs=1");
            return;
        }
        const std::string prompt = body.at("prompt").get<std::string>();
        const int ordinal = record("completions", prompt, -1, req.body);
        apply_delays();
        if (apply_fault(ordinal, res)) return;

        // If a scripted text is a suffix of the prompt, the rest is context:
        // context gets default per-codepoint logprobs, the suffix gets the
        // scripted values spread over its codepoints.
        std::string context = prompt;
        std::string scored = prompt;
        const std::vector<double>* scripted = nullptr;
        for (const auto& [text, values] : script.logprob_texts) {
            if (text.size() <= prompt.size() &&
                prompt.compare(prompt.size() - text.size(), text.size(), text) == 0) {
                context = prompt.substr(0, prompt.size() - text.size());
                scored = text;
                scripted = &values;
                break;
            }
        }
        if (!scripted) context.clear();

        json tokens = json::array(), values = json::array(), offsets = json::array();
        const std::uint64_t prompt_hash = fnv1a64(prompt);
        const auto context_offsets = codepoint_offsets(context);
        for (std::size_t i = 0; i + 1 < context_offsets.size(); ++i) {
            tokens.push_back(context.substr(context_offsets[i], context_offsets[i + 1] - context_offsets[i]));
            values.push_back(default_token_logprob(prompt_hash, i, script.salt));
            offsets.push_back(context_offsets[i]);
        }
        std::string tail = scripted ? scored : prompt;
        const auto tail_offsets = codepoint_offsets(tail);
        const std::size_t tail_cp = tail_offsets.size() - 1;
        const std::size_t tail_base = context.size();
        if (scripted) {
            // split the scored text's codepoints into |values| contiguous chunks
            const std::size_t chunk_count = scripted->size();
            for (std::size_t chunk = 0; chunk < chunk_count; ++chunk) {
                const std::size_t begin = tail_offsets[chunk * tail_cp / chunk_count];
                const std::size_t end = tail_offsets[(chunk + 1) * tail_cp / chunk_count];
                tokens.push_back(tail.substr(begin, end - begin));
                values.push_back((*scripted)[chunk]);
                offsets.push_back(tail_base + begin);
            }
        } else {
            for (std::size_t i = 0; i + 1 < tail_offsets.size(); ++i) {
                tokens.push_back(tail.substr(tail_offsets[i], tail_offsets[i + 1] - tail_offsets[i]));
                values.push_back(default_token_logprob(prompt_hash, i, script.salt));
                offsets.push_back(tail_base + tail_offsets[i]);
            }
        }

        json out = {
            {"id", "mock-completions"},
            {"object", "text_completion"},
            {"model", body.at("model")},
            {"choices", json::array({json{{"index", 0},
                                          {"text", prompt},
                                          {"finish_reason", "length"},
                                          {"logprobs", json{{"tokens", tokens},
                                                            {"token_logprobs", values},
                                                            {"text_offset", offsets}}}}})},
        };
        res.set_content(out.dump(), "application/json");
    }

    void handle_score(const httplib::Request& req, httplib::Response& res) {
        HandlerGuard guard(this);
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            reject(res, "request body is not JSON");
            return;
        }
        if (!check_schema(body, {"model", "prompt", "response"}, {}, res)) return;
        const std::string prompt = body.at("prompt").get<std::string>();
        const std::string response_text = body.at("response").get<std::string>();
        const int ordinal = record("score", prompt, -1, req.body);
        apply_delays();
        if (apply_fault(ordinal, res)) return;

        double score;
        auto it = script.rewards.find({prompt, response_text});
        if (it != script.rewards.end()) {
            score = it->second;
        } else {
            score = script.quality_of(response_text);
        }
        json out = {{"model", body.at("model")}, {"score", std::isnan(score) ? json(nullptr) : json(score)}};
        res.set_content(out.dump(), "application/json");
    }

    void handle_transcript(const httplib::Request&, httplib::Response& res) {
        json requests_json = json::array();
        Transcript snapshot;
        {
            std::lock_guard<std::mutex> lock(mu);
            snapshot.requests = requests;
            snapshot.max_concurrency = max_concurrency;
        }
        for (const TranscriptEntry& e : snapshot.requests)
            requests_json.push_back(json{{"ordinal", e.ordinal},
                                         {"route", e.route},
                                         {"prompt", e.prompt},
                                         {"prompt_ordinal", e.prompt_ordinal},
                                         {"timestamp_us", e.timestamp_us}});
        json out = {{"max_concurrency", snapshot.max_concurrency}, {"requests", requests_json}};
        res.set_content(out.dump(), "application/json");
    }
};

MockServer::MockServer(MockScript script, int port, int handler_threads) : impl_(new Impl) {
    impl_->script = std::move(script);
    impl_->server.new_task_queue = [handler_threads] { return new httplib::ThreadPool(handler_threads); };

    impl_->server.Post("/v1/chat/completions",
                       [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
                           impl->handle_chat(req, res);
                       });
    impl_->server.Post("/v1/completions",
                       [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
                           impl->handle_completions(req, res);
                       });
    impl_->server.Post("/v1/score",
                       [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
                           impl->handle_score(req, res);
                       });
    impl_->server.Get("/__transcript",
                      [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
                          impl->handle_transcript(req, res);
                      });

    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->port <= 0) raise(ErrorCode::port_in_use, "cannot bind mock server to an ephemeral port");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port))
            raise(ErrorCode::port_in_use, "port " + std::to_string(port) + " is unavailable");
        impl_->port = port;
    }

    impl_->listener = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
    for (int i = 0; i < 5000 && !impl_->server.is_running(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    if (!impl_->server.is_running()) {
        impl_->server.stop();
        if (impl_->listener.joinable()) impl_->listener.join();
        raise(ErrorCode::port_in_use, "mock server failed to start listening");
    }
    LOG_DEBUG("mock server listening on port " << impl_->port);
}

MockServer::~MockServer() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->listener.joinable()) impl_->listener.join();
}

int MockServer::port() const noexcept { return impl_->port; }

std::string MockServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

Transcript MockServer::transcript() const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    return Transcript{impl_->requests, impl_->max_concurrency};
}

} // namespace bestofn
