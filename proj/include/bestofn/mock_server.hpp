#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace bestofn {

enum class JudgePolicy {
    prefer_quality_table,  // swap-consistent "perfect judge" over text qualities
    always_A,
    always_B,
    always_tie,
    position_biased,  // prefers whatever is listed first, like always_A
    emit_garbage,     // reply without any verdict marker
};

enum class FaultKind { http500, timeout, malformed };

JudgePolicy judge_policy_from_name(const std::string& name);
FaultKind fault_kind_from_name(const std::string& name);

struct GenerationEntry {
    std::string text;
    std::vector<double> token_logprobs;
};

// Declarative behavior of the mock stack. Everything not scripted falls
// back to content-hash-derived defaults, so responses stay a pure function
// of (script, request content, request ordinal).
struct MockScript {
    // (prompt text, per-prompt request ordinal) -> generation
    std::map<std::pair<std::string, int>, GenerationEntry> generations;
    // (prompt, response) -> reward; a NaN value makes the server emit null
    std::map<std::pair<std::string, std::string>, double> rewards;
    // scored text -> logprobs for /v1/completions echo scoring
    std::map<std::string, std::vector<double>> logprob_texts;
    JudgePolicy judge_policy = JudgePolicy::prefer_quality_table;
    std::map<std::string, double> quality_table;  // text -> quality override
    std::map<int, FaultKind> faults;              // global request ordinal -> fault
    std::chrono::milliseconds response_delay{0};
    std::chrono::milliseconds random_delay_max{0};
    std::chrono::milliseconds timeout_fault_sleep{1500};
    std::uint64_t salt = 0;  // perturbs every hash-derived default

    // uniform-ish in [0,1], derived from the text content
    static double default_quality(const std::string& text, std::uint64_t salt = 0);
    static GenerationEntry default_generation(const std::string& prompt, int ordinal,
                                              std::uint64_t salt = 0);
    double quality_of(const std::string& text) const;
};

// Fixture file loader (JSON; all fields optional).
MockScript load_script(const std::filesystem::path& path);

struct TranscriptEntry {
    int ordinal = 0;  // global arrival order
    std::string route;  // "chat", "judge", "completions", "score"
    std::string prompt;
    int prompt_ordinal = -1;  // per-prompt generation ordinal; -1 otherwise
    std::int64_t timestamp_us = 0;  // since server start
    std::string body;
};

struct Transcript {
    std::vector<TranscriptEntry> requests;
    int max_concurrency = 0;
};

// In-process HTTP server speaking the client's wire protocols for all four
// backend roles, plus GET /__transcript for test introspection. Inbound
// payloads are schema-checked strictly: unknown or missing fields are a
// 400, which pins the client's wire format in tests.
class MockServer {
public:
    explicit MockServer(MockScript script, int port = 0, int handler_threads = 64);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    int port() const noexcept;
    std::string base_url() const;
    Transcript transcript() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace bestofn
