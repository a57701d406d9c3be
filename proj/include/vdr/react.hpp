#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vdr/trajectory.hpp"

namespace vdr {

// ReAct response grammar: exactly one <think>...</think> block followed by
// exactly one of <tool_call>...</tool_call> (JSON call list) or
// <answer>...</answer>. Anything else is a format error.
enum class ReactKind { tool_calls, answer, format_error };

struct ParsedReact {
    ReactKind kind = ReactKind::format_error;
    std::string reasoning;
    std::vector<ToolCall> calls;  // kind == tool_calls
    std::string answer;           // kind == answer
    std::string error;            // kind == format_error

    bool ok() const { return kind != ReactKind::format_error; }
};

// Never throws on arbitrary byte input; returns a format_error value instead.
ParsedReact parse_react(std::string_view text);

std::string render_react(const std::string& reasoning,
                         const std::vector<ToolCall>& calls);
std::string render_react(const std::string& reasoning, const Answer& answer);
std::string render_action(const StepAction& action);

// Canonical call ids are positional: c1..cN within one action.
std::string canonical_call_id(int index);

// Splits multi-crop visual_search calls into one call per crop and reassigns
// canonical ids, so steps satisfy |observations| == |calls|.
std::vector<ToolCall> normalize_calls(std::vector<ToolCall> calls);

}  // namespace vdr
