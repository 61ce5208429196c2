#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "star/foon.hpp"
#include "star/retrieval.hpp"

namespace star {

class ProviderError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ImageAttachment {
    std::string sha256;
    std::vector<std::uint8_t> png_bytes;
};

struct PromptText {
    std::string system;
    std::string user;
    std::vector<std::pair<std::string, std::string>> few_shot;  // (request, FOON-text)
    std::vector<ImageAttachment> images;

    /// Deterministic flat rendering; image attachments appear as
    /// `[image N sha256=...]` lines so scripts can key on checksums.
    std::string render() const;
};

/// Boundary to the foundation model. call_count moves exactly once per
/// complete(), including failing calls, and is safe under concurrency.
class CompletionProvider {
  public:
    virtual ~CompletionProvider() = default;

    std::string complete(const PromptText& prompt, int max_tokens = 2048) {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return do_complete(prompt, max_tokens);
    }
    int call_count() const { return calls_.load(std::memory_order_relaxed); }

  protected:
    virtual std::string do_complete(const PromptText& prompt, int max_tokens) = 0;

  private:
    std::atomic<int> calls_{0};
};

struct ScriptEntry {
    std::string match;  // substring of the rendered prompt; "" matches anything
    std::string response;
};

/// Deterministic scripted provider: each call consumes the first
/// not-yet-used entry whose matcher occurs in the rendered prompt.
/// No matching entry left = script exhaustion, a ProviderError.
class MockProvider : public CompletionProvider {
  public:
    explicit MockProvider(std::vector<ScriptEntry> script) : script_(std::move(script)) {}

    static MockProvider from_json_text(const std::string& text);
    static MockProvider from_json_file(const std::string& path);

  protected:
    std::string do_complete(const PromptText& prompt, int max_tokens) override;

  private:
    std::vector<ScriptEntry> script_;
    std::vector<bool> used_ = std::vector<bool>(script_.size(), false);
    std::mutex mutex_;
};

/// OpenAI-compatible chat-completions adapter. Configuration comes from
/// STAR_FM_ENDPOINT, STAR_FM_KEY and STAR_FM_MODEL unless given here.
class HttpProvider : public CompletionProvider {
  public:
    HttpProvider();  // from environment
    HttpProvider(std::string endpoint, std::string api_key, std::string model);

  protected:
    std::string do_complete(const PromptText& prompt, int max_tokens) override;

  private:
    std::string endpoint_;
    std::string api_key_;
    std::string model_;
};

/// Few-shot corpus: `=== <request>` headers followed by FOON-text.
struct ExampleCorpus {
    std::vector<std::pair<std::string, std::string>> examples;

    static ExampleCorpus from_text(const std::string& text);
    static ExampleCorpus load(const std::string& path);
};

struct VerificationReport {
    bool valid = false;
    std::set<std::string> missing_objects;
    bool unreachable_goal = false;
    std::vector<std::string> syntax_violations;

    /// Human/model readable digest, used as retry feedback.
    std::string summary() const;
};

struct TreeResponse {
    std::optional<std::vector<FunctionalUnit>> units;
    std::vector<std::string> violations;
};

inline constexpr std::size_t kDefaultFewShotCount = 5;
inline constexpr std::size_t kDefaultRetryLimit = 3;

PromptText build_generation_prompt(const std::string& request_goal, const KitchenState& kitchen,
                                   const ExampleCorpus& corpus,
                                   std::size_t example_count = kDefaultFewShotCount);

/// Embeds the serialized partial tree with modification instructions.
/// An empty partial falls back to a generation prompt when a corpus is
/// supplied, and is an error otherwise.
PromptText build_modification_prompt(const std::string& request_goal, const TaskTree& partial,
                                     const KitchenState& kitchen,
                                     const ExampleCorpus* corpus = nullptr,
                                     std::size_t example_count = kDefaultFewShotCount);

/// Extracts the first FOON-text block (fenced or raw) and parses it.
TreeResponse parse_tree_response(const std::string& text);

/// Set-propagation check of a tree against the kitchen; reports every
/// missing object, not just the first.
VerificationReport verify_tree(const TaskTree& tree, const KitchenState& kitchen,
                               const ObjectNode& goal);

class GenerationError : public std::runtime_error {
  public:
    GenerationError(const std::string& message, VerificationReport report)
        : std::runtime_error(message), last_report(std::move(report)) {}
    VerificationReport last_report;
};

/// complete -> parse -> verify loop with violation feedback appended to
/// each retry. Returns the first verified tree; throws GenerationError
/// once retry_limit calls have failed.
TaskTree generate_or_repair(CompletionProvider& provider, const RetrievalOutcome& outcome,
                            const std::string& request_goal, const KitchenState& kitchen,
                            const ExampleCorpus& corpus,
                            std::size_t retry_limit = kDefaultRetryLimit);

/// Natural-language goal extraction: one provider call returning
/// `name | states`; with no provider a `make/prepare/cook <dish>`
/// pattern is handled offline.
std::string extract_goal(CompletionProvider* provider, const std::string& utterance);

}  // namespace star
