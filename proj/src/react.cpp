#include "vdr/react.hpp"

#include <nlohmann/json.hpp>

#include "vdr/serialize.hpp"

namespace vdr {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string_view::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

struct Block {
    bool present = false;
    bool well_formed = false;
    std::string content;
    std::size_t open_pos = 0;
};

Block extract_block(std::string_view text, std::string_view tag) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    Block b;
    const std::size_t n_open = count_occurrences(text, open);
    const std::size_t n_close = count_occurrences(text, close);
    b.present = n_open > 0 || n_close > 0;
    if (n_open != 1 || n_close != 1) return b;
    const std::size_t o = text.find(open);
    const std::size_t c = text.find(close);
    if (c < o) return b;
    b.well_formed = true;
    b.open_pos = o;
    b.content = trim(text.substr(o + open.size(), c - o - open.size()));
    return b;
}

ParsedReact fail(std::string why) {
    ParsedReact r;
    r.kind = ReactKind::format_error;
    r.error = std::move(why);
    return r;
}

bool parse_calls_json(const nlohmann::json& arr, std::vector<ToolCall>& out) {
    for (const auto& item : arr) {
        if (!item.is_object()) return false;
        try {
            out.push_back(toolcall_from_json(item));
        } catch (const std::exception&) {
            return false;
        }
        if (!out.back().args_match_tool()) return false;
    }
    return true;
}

}  // namespace

std::string canonical_call_id(int index) {
    return "c" + std::to_string(index + 1);
}

ParsedReact parse_react(std::string_view text) {
    Block think = extract_block(text, "think");
    if (!think.present) return fail("missing think block");
    if (!think.well_formed) return fail("unbalanced think block");

    Block tool = extract_block(text, "tool_call");
    Block answer = extract_block(text, "answer");
    if (tool.present && answer.present)
        return fail("both tool_call and answer blocks present");
    if (!tool.present && !answer.present)
        return fail("neither tool_call nor answer block present");

    ParsedReact r;
    r.reasoning = think.content;

    if (answer.present) {
        if (!answer.well_formed) return fail("unbalanced answer block");
        if (answer.open_pos < think.open_pos)
            return fail("answer block precedes think block");
        r.kind = ReactKind::answer;
        r.answer = answer.content;
        return r;
    }

    if (!tool.well_formed) return fail("unbalanced tool_call block");
    if (tool.open_pos < think.open_pos)
        return fail("tool_call block precedes think block");

    nlohmann::json body =
        nlohmann::json::parse(tool.content, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded()) return fail("tool_call body is not valid JSON");
    if (body.is_object()) body = nlohmann::json::array({body});
    if (!body.is_array() || body.empty())
        return fail("tool_call body is not a call list");

    std::vector<ToolCall> calls;
    if (!parse_calls_json(body, calls)) return fail("malformed tool call");
    for (std::size_t i = 0; i < calls.size(); ++i)
        calls[i].call_id = canonical_call_id(static_cast<int>(i));
    r.kind = ReactKind::tool_calls;
    r.calls = std::move(calls);
    return r;
}

std::string render_react(const std::string& reasoning,
                         const std::vector<ToolCall>& calls) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ToolCall& c : calls) arr.push_back(toolcall_to_json(c, false));
    return "<think>" + reasoning + "</think>\n<tool_call>\n" + arr.dump() +
           "\n</tool_call>";
}

std::string render_react(const std::string& reasoning, const Answer& answer) {
    return "<think>" + reasoning + "</think>\n<answer>" + answer.text +
           "</answer>";
}

std::string render_action(const StepAction& action) {
    if (const auto* a = std::get_if<Answer>(&action))
        return "<answer>" + a->text + "</answer>";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ToolCall& c : std::get<std::vector<ToolCall>>(action))
        arr.push_back(toolcall_to_json(c, false));
    return "<tool_call>\n" + arr.dump() + "\n</tool_call>";
}

std::vector<ToolCall> normalize_calls(std::vector<ToolCall> calls) {
    std::vector<ToolCall> out;
    for (ToolCall& c : calls) {
        auto* vs = std::get_if<VisualSearchArgs>(&c.args);
        if (vs == nullptr || vs->crops.size() <= 1) {
            out.push_back(std::move(c));
            continue;
        }
        for (const CropSpec& crop : vs->crops) {
            ToolCall single;
            single.tool = Tool::visual_search;
            single.args = VisualSearchArgs{vs->image_id, {crop}};
            out.push_back(std::move(single));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].call_id = canonical_call_id(static_cast<int>(i));
    return out;
}

}  // namespace vdr
