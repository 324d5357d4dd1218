#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cutkit/canonical_json.hpp"

namespace cutkit {

enum class PromptKind { SystemInstruction, TextElement, ContextBlock };

struct PromptElement {
    PromptKind kind = PromptKind::TextElement;
    int priority = 0;
    std::string body;
    std::string tag; // ContextBlock XML tag

    std::string rendered() const;
};

// Token counting is pluggable; the default approximation is ceil(bytes / 4),
// which satisfies count(a+b) <= count(a) + count(b) + 1. Only the <=-budget
// contract matters to the assembler.
using TokenCounter = std::function<size_t(const std::string&)>;
size_t approx_token_count(const std::string& text);

// Greedy, priority-ordered assembly under a token budget. Elements are
// scanned in descending priority (insertion order within ties); one that
// would overflow is skipped and the scan continues. Selected elements render
// in category order: system instructions, free text, context blocks.
std::string assemble_prompt(const std::vector<PromptElement>& elements, size_t token_budget,
                            const TokenCounter& counter = approx_token_count);

struct Message {
    std::string role; // system | user | assistant | tool
    std::string content;
    bool is_state_block = false;
};

using Conversation = std::vector<Message>;

inline constexpr const char* kStateBlockTag = "current_cutscene_content";

// Replaces any previous state block (never appends a second one) so the
// conversation carries exactly one live sequence snapshot.
void inject_state(Conversation& conversation, const std::string& sequence_state_doc);

std::string wrap_state_block(const std::string& sequence_state_doc);

struct HistoryEntry {
    std::string tool;
    json args;
    json result;
    bool mutation_flag = false;
    bool summarized = false; // true only for the synthetic summary entry
    std::vector<std::string> summarized_tools;

    std::string render() const;
};

// Category-aware compression: the most recent `keep_recent_n` entries stay
// full; of the older entries, the latest invocation of each query tool stays
// full and everything else collapses into one summary entry listing tool
// names. Idempotent.
std::vector<HistoryEntry> compress_history(const std::vector<HistoryEntry>& entries,
                                           size_t keep_recent_n);

} // namespace cutkit
