#include "cutkit/prompt.hpp"

#include <algorithm>
#include <map>

namespace cutkit {

std::string PromptElement::rendered() const {
    if (kind == PromptKind::ContextBlock) {
        const std::string t = tag.empty() ? "context" : tag;
        return "<" + t + ">\n" + body + "\n</" + t + ">";
    }
    return body;
}

size_t approx_token_count(const std::string& text) { return (text.size() + 3) / 4; }

std::string assemble_prompt(const std::vector<PromptElement>& elements, size_t token_budget,
                            const TokenCounter& counter) {
    std::vector<size_t> order(elements.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return elements[a].priority > elements[b].priority;
    });

    std::vector<size_t> selected;
    size_t used = 0;
    for (size_t idx : order) {
        const size_t cost = counter(elements[idx].rendered()) + (selected.empty() ? 0 : 1);
        if (used + cost > token_budget) continue; // skip and keep scanning
        used += cost;
        selected.push_back(idx);
    }

    // render selected elements: category, then priority, then insertion order
    std::stable_sort(selected.begin(), selected.end(), [&](size_t a, size_t b) {
        if (elements[a].kind != elements[b].kind)
            return static_cast<int>(elements[a].kind) < static_cast<int>(elements[b].kind);
        if (elements[a].priority != elements[b].priority)
            return elements[a].priority > elements[b].priority;
        return a < b;
    });

    std::string out;
    for (size_t i = 0; i < selected.size(); ++i) {
        if (i) out += "\n";
        out += elements[selected[i]].rendered();
    }
    return out;
}

std::string wrap_state_block(const std::string& sequence_state_doc) {
    return std::string("<") + kStateBlockTag + ">\n" + sequence_state_doc + "\n</" +
           kStateBlockTag + ">";
}

void inject_state(Conversation& conversation, const std::string& sequence_state_doc) {
    Message block{"system", wrap_state_block(sequence_state_doc), true};
    for (auto& m : conversation) {
        if (m.is_state_block) {
            m = std::move(block);
            return;
        }
    }
    conversation.push_back(std::move(block));
}

std::string HistoryEntry::render() const {
    if (summarized) {
        std::string names;
        for (size_t i = 0; i < summarized_tools.size(); ++i)
            names += (i ? ", " : "") + summarized_tools[i];
        return "<compressed_tool_history>" + names + "</compressed_tool_history>";
    }
    return tool + "(" + args.dump() + ") -> " + result.dump();
}

std::vector<HistoryEntry> compress_history(const std::vector<HistoryEntry>& entries,
                                           size_t keep_recent_n) {
    if (entries.size() <= keep_recent_n) return entries;
    const size_t old_count = entries.size() - keep_recent_n;

    // latest invocation index of each query tool across the whole history
    std::map<std::string, size_t> latest_query;
    for (size_t i = 0; i < entries.size(); ++i)
        if (!entries[i].mutation_flag && !entries[i].summarized)
            latest_query[entries[i].tool] = i;

    std::vector<std::string> names;
    const auto add_name = [&](const std::string& n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    };

    std::vector<HistoryEntry> out;
    bool summary_emitted = false;
    size_t summary_pos = 0;
    for (size_t i = 0; i < old_count; ++i) {
        const HistoryEntry& e = entries[i];
        if (e.summarized) {
            for (const auto& n : e.summarized_tools) add_name(n);
            if (!summary_emitted) {
                summary_emitted = true;
                summary_pos = out.size();
                out.push_back(HistoryEntry{}); // placeholder, filled below
            }
            continue;
        }
        if (!e.mutation_flag && latest_query.at(e.tool) == i) {
            out.push_back(e); // most recent invocation of this query tool
            continue;
        }
        add_name(e.tool);
        if (!summary_emitted) {
            summary_emitted = true;
            summary_pos = out.size();
            out.push_back(HistoryEntry{});
        }
    }
    if (summary_emitted) {
        HistoryEntry summary;
        summary.summarized = true;
        summary.mutation_flag = true;
        summary.tool = "compressed_tool_history";
        summary.summarized_tools = std::move(names);
        out[summary_pos] = std::move(summary);
    }
    out.insert(out.end(), entries.begin() + static_cast<long>(old_count), entries.end());
    return out;
}

} // namespace cutkit
