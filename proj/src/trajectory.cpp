#include "vdr/trajectory.hpp"

#include <stdexcept>

#include "vdr/react.hpp"

namespace vdr {

namespace {

template <typename E>
[[noreturn]] void bad_enum(std::string_view what, std::string_view value) {
    throw std::invalid_argument(std::string("unknown ") + std::string(what) +
                                ": " + std::string(value));
}

}  // namespace

std::string_view to_string(Tool t) {
    switch (t) {
        case Tool::visual_search: return "visual_search";
        case Tool::web_search: return "web_search";
        case Tool::visit_page: return "visit_page";
        case Tool::summarize_page: return "summarize_page";
        case Tool::code_exec: return "code_exec";
    }
    return "?";
}

Tool tool_from_string(std::string_view s) {
    if (s == "visual_search") return Tool::visual_search;
    if (s == "web_search") return Tool::web_search;
    if (s == "visit_page") return Tool::visit_page;
    if (s == "summarize_page") return Tool::summarize_page;
    if (s == "code_exec") return Tool::code_exec;
    bad_enum<Tool>("tool", s);
}

std::string_view to_string(ObsStatus s) {
    switch (s) {
        case ObsStatus::ok: return "ok";
        case ObsStatus::tool_error: return "tool_error";
        case ObsStatus::format_error: return "format_error";
        case ObsStatus::timeout: return "timeout";
    }
    return "?";
}

ObsStatus obs_status_from_string(std::string_view s) {
    if (s == "ok") return ObsStatus::ok;
    if (s == "tool_error") return ObsStatus::tool_error;
    if (s == "format_error") return ObsStatus::format_error;
    if (s == "timeout") return ObsStatus::timeout;
    bad_enum<ObsStatus>("observation status", s);
}

std::string_view to_string(Phase p) {
    return p == Phase::vision ? "vision" : "text";
}

Phase phase_from_string(std::string_view s) {
    if (s == "vision") return Phase::vision;
    if (s == "text") return Phase::text;
    bad_enum<Phase>("phase", s);
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::in_progress: return "in_progress";
        case Termination::answered: return "answered";
        case Termination::judge_hit_then_answered:
            return "judge_hit_then_answered";
        case Termination::max_turns: return "max_turns";
        case Termination::context_exceeded: return "context_exceeded";
        case Termination::repetition: return "repetition";
        case Termination::error_cascade: return "error_cascade";
    }
    return "?";
}

Termination termination_from_string(std::string_view s) {
    if (s == "answered") return Termination::answered;
    if (s == "judge_hit_then_answered")
        return Termination::judge_hit_then_answered;
    if (s == "max_turns") return Termination::max_turns;
    if (s == "context_exceeded") return Termination::context_exceeded;
    if (s == "repetition") return Termination::repetition;
    if (s == "error_cascade") return Termination::error_cascade;
    bad_enum<Termination>("termination", s);
}

std::string_view to_string(AppendStatus s) {
    switch (s) {
        case AppendStatus::accepted: return "accepted";
        case AppendStatus::max_turns_exceeded: return "max_turns";
        case AppendStatus::max_context_exceeded: return "max_context_tokens";
        case AppendStatus::max_turn_tokens_exceeded: return "max_turn_tokens";
    }
    return "?";
}

bool ToolCall::args_match_tool() const {
    switch (tool) {
        case Tool::visual_search: {
            auto* a = std::get_if<VisualSearchArgs>(&args);
            return a != nullptr && !a->crops.empty();
        }
        case Tool::web_search:
            return std::holds_alternative<WebSearchArgs>(args);
        case Tool::visit_page:
            return std::holds_alternative<VisitPageArgs>(args);
        case Tool::summarize_page:
            return std::holds_alternative<SummarizePageArgs>(args);
        case Tool::code_exec:
            return std::holds_alternative<CodeExecArgs>(args);
    }
    return false;
}

bool Step::is_recovery() const {
    const auto* c = calls();
    return c != nullptr && c->empty() && observations.size() == 1 &&
           observations[0].status == ObsStatus::format_error &&
           observations[0].for_call.empty();
}

Step make_recovery_step(int turn, Phase phase, std::string raw_reasoning) {
    Step s;
    s.turn = turn;
    s.phase = phase;
    s.reasoning = std::move(raw_reasoning);
    s.action = std::vector<ToolCall>{};
    Observation obs;
    obs.status = ObsStatus::format_error;
    obs.content = std::string(kFormatErrorContent);
    s.observations = {obs};
    return s;
}

std::optional<std::string> Trajectory::final_answer() const {
    if (steps.empty()) return std::nullopt;
    if (const auto* a = std::get_if<Answer>(&steps.back().action))
        return a->text;
    return std::nullopt;
}

std::string step_response_text(const Step& step) {
    if (const auto* a = std::get_if<Answer>(&step.action))
        return render_react(step.reasoning, *a);
    return render_react(step.reasoning, *step.calls());
}

std::size_t step_context_tokens(const Step& step, const TokenCounter& counter) {
    std::size_t n = counter(step_response_text(step));
    for (const Observation& o : step.observations) n += counter(o.content);
    return n;
}

std::size_t context_tokens(const Trajectory& t, const TokenCounter& counter) {
    std::size_t n = counter(t.question);
    if (t.description) n += counter(*t.description);
    for (const Step& s : t.steps) n += step_context_tokens(s, counter);
    return n;
}

AppendStatus append_step(Trajectory& t, Step step, const Budgets& budgets,
                         const TokenCounter& counter) {
    if (!budgets.valid()) throw std::invalid_argument("append_step: bad budgets");
    const int expected_turn = static_cast<int>(t.steps.size()) + 1;
    if (step.turn != expected_turn)
        throw std::invalid_argument("append_step: non-contiguous turn index");
    if (!t.steps.empty() && t.steps.back().phase == Phase::text &&
        step.phase == Phase::vision)
        throw std::invalid_argument("append_step: phase regression");
    if (step.is_terminal()) {
        if (!step.observations.empty())
            throw std::invalid_argument(
                "append_step: terminal step with observations");
    } else if (!step.is_recovery() &&
               step.observations.size() != step.calls()->size()) {
        throw std::invalid_argument(
            "append_step: observation/call count mismatch");
    }

    if (static_cast<int>(t.steps.size()) + 1 > budgets.max_turns)
        return AppendStatus::max_turns_exceeded;
    if (counter(step_response_text(step)) > budgets.max_turn_tokens)
        return AppendStatus::max_turn_tokens_exceeded;
    if (context_tokens(t, counter) + step_context_tokens(step, counter) >
        budgets.max_context_tokens)
        return AppendStatus::max_context_exceeded;

    if (step.phase == Phase::vision) t.t_v += 1;
    t.steps.push_back(std::move(step));
    return AppendStatus::accepted;
}

std::vector<std::string> check_invariants(const Trajectory& t) {
    std::vector<std::string> errs;
    auto fail = [&errs](std::string msg) { errs.push_back(std::move(msg)); };

    if (t.image && !t.image->valid()) fail("invalid image payload");

    int vision_count = 0;
    bool seen_text = false;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        if (s.turn != static_cast<int>(i) + 1) {
            fail("turn indices not contiguous from 1");
            break;
        }
        if (s.phase == Phase::vision) {
            if (seen_text) {
                fail("phase ordering: vision step after text step");
                break;
            }
            ++vision_count;
        } else {
            seen_text = true;
        }
    }

    if (vision_count != t.t_v)
        fail("t_v does not equal number of vision-phase steps");

    for (const Step& s : t.steps) {
        if (s.is_terminal()) {
            if (!s.observations.empty())
                fail("terminal-answer step has observations");
            if (&s != &t.steps.back())
                fail("terminal-answer step before end of trajectory");
            continue;
        }
        const auto& calls = *s.calls();
        if (!s.is_recovery() && s.observations.size() != calls.size())
            fail("observation count does not match call count");
        for (const ToolCall& c : calls) {
            if (!c.args_match_tool()) {
                fail("tool call args do not match tool kind");
                continue;
            }
            if (c.tool == Tool::visual_search && t.image) {
                const auto& vs = std::get<VisualSearchArgs>(c.args);
                for (const CropSpec& crop : vs.crops) {
                    if (crop.scale <= 0.0) fail("crop scale not positive");
                    if (!crop.box.valid_for(t.image->width, t.image->height))
                        fail("crop box invalid for image");
                }
            }
        }
        for (const Observation& o : s.observations) {
            if (o.status == ObsStatus::ok && o.content.empty())
                fail("ok observation with empty content");
            if (o.status == ObsStatus::format_error &&
                o.content != kFormatErrorContent)
                fail("format_error observation with non-canonical content");
        }
    }
    return errs;
}

}  // namespace vdr
