#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vdr/image.hpp"
#include "vdr/tokens.hpp"

namespace vdr {

enum class Tool {
    visual_search,
    web_search,
    visit_page,
    summarize_page,
    code_exec,
};

enum class ObsStatus { ok, tool_error, format_error, timeout };

enum class Phase { vision, text };

enum class Termination {
    in_progress,  // never serialized; a trajectory still being built
    answered,
    judge_hit_then_answered,
    max_turns,
    context_exceeded,
    repetition,
    error_cascade,
};

std::string_view to_string(Tool t);
std::string_view to_string(ObsStatus s);
std::string_view to_string(Phase p);
std::string_view to_string(Termination t);
Tool tool_from_string(std::string_view s);
ObsStatus obs_status_from_string(std::string_view s);
Phase phase_from_string(std::string_view s);
Termination termination_from_string(std::string_view s);

struct VisualSearchArgs {
    std::string image_id;          // references the trajectory image
    std::vector<CropSpec> crops;   // >= 1
    friend bool operator==(const VisualSearchArgs&,
                           const VisualSearchArgs&) = default;
};
struct WebSearchArgs {
    std::string query;
    friend bool operator==(const WebSearchArgs&, const WebSearchArgs&) = default;
};
struct VisitPageArgs {
    std::string url;
    friend bool operator==(const VisitPageArgs&, const VisitPageArgs&) = default;
};
struct SummarizePageArgs {
    std::string url;
    std::string query;
    friend bool operator==(const SummarizePageArgs&,
                           const SummarizePageArgs&) = default;
};
struct CodeExecArgs {
    std::string source;
    friend bool operator==(const CodeExecArgs&, const CodeExecArgs&) = default;
};

using ToolArgs = std::variant<VisualSearchArgs, WebSearchArgs, VisitPageArgs,
                              SummarizePageArgs, CodeExecArgs>;

struct ToolCall {
    std::string call_id;
    Tool tool = Tool::web_search;
    ToolArgs args;

    // args variant index agrees with the tool enum
    bool args_match_tool() const;
    friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

// The exact recovery string fed back to a model that produced an unparseable
// response.
inline constexpr std::string_view kFormatErrorContent =
    "format error, please try again";

struct Observation {
    std::string for_call;
    ObsStatus status = ObsStatus::ok;
    std::string content;
    std::vector<std::string> sources;
    std::int64_t latency_ms = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct Answer {
    std::string text;
    friend bool operator==(const Answer&, const Answer&) = default;
};

using StepAction = std::variant<std::vector<ToolCall>, Answer>;

struct Step {
    int turn = 0;
    Phase phase = Phase::vision;
    std::string reasoning;
    StepAction action;
    std::vector<Observation> observations;

    bool is_terminal() const { return std::holds_alternative<Answer>(action); }
    const std::vector<ToolCall>* calls() const {
        return std::get_if<std::vector<ToolCall>>(&action);
    }
    // A recovery step records a format error: no calls, exactly one
    // format_error observation carrying the canonical recovery string.
    bool is_recovery() const;
    friend bool operator==(const Step&, const Step&) = default;
};

Step make_recovery_step(int turn, Phase phase, std::string raw_reasoning);

struct Trajectory {
    std::string id;
    std::string question;
    std::optional<ImageRef> image;        // absent for text-only QA
    std::optional<std::string> description;
    std::vector<Step> steps;
    int t_v = 0;  // number of vision-phase steps
    Termination termination = Termination::in_progress;
    std::optional<std::string> ground_truth;

    std::optional<std::string> final_answer() const;
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Budgets {
    int max_turns = 50;
    std::size_t max_context_tokens = 65536;
    std::size_t max_turn_tokens = 4096;

    bool valid() const {
        return max_turns > 0 && max_context_tokens > 0 && max_turn_tokens > 0;
    }
};

enum class AppendStatus {
    accepted,
    max_turns_exceeded,
    max_context_exceeded,
    max_turn_tokens_exceeded,
};
std::string_view to_string(AppendStatus s);

// Model-response text of a step: reasoning plus rendered action, i.e. what the
// policy emitted this turn. Used for the single-turn token budget.
std::string step_response_text(const Step& step);

// Everything a step contributes to the context window (response plus returned
// observations).
std::size_t step_context_tokens(const Step& step, const TokenCounter& counter);

std::size_t context_tokens(const Trajectory& t, const TokenCounter& counter);

// Appends `step` if it fits every budget; on a violation the trajectory is
// left untouched and the exceeded budget is named. Throws
// std::invalid_argument on structural misuse (non-contiguous turn index,
// vision step after a text step, terminal step with observations, call /
// observation count mismatch).
AppendStatus append_step(Trajectory& t, Step step, const Budgets& budgets,
                         const TokenCounter& counter = default_token_counter());

// Full invariant audit; returns one message per violated invariant, empty for
// a well-formed trajectory. Used by decode and by `vdr validate`.
std::vector<std::string> check_invariants(const Trajectory& t);

}  // namespace vdr
