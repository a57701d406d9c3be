#include "vdr/serialize.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace vdr {

namespace {

constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(std::string_view in) {
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    unsigned val = 0;
    int bits = -6;
    for (unsigned char c : in) {
        val = (val << 8) + c;
        bits += 8;
        while (bits >= 0) {
            out.push_back(kB64[(val >> bits) & 0x3F]);
            bits -= 6;
        }
    }
    if (bits > -6) out.push_back(kB64[((val << 8) >> (bits + 8)) & 0x3F]);
    while (out.size() % 4) out.push_back('=');
    return out;
}

std::string base64_decode(std::string_view in) {
    std::array<int, 256> rev;
    rev.fill(-1);
    for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kB64[i])] = i;
    std::string out;
    unsigned val = 0;
    int bits = -8;
    for (unsigned char c : in) {
        if (c == '=') break;
        if (rev[c] == -1) throw DecodeError("malformed record: bad base64");
        val = (val << 6) + static_cast<unsigned>(rev[c]);
        bits += 6;
        if (bits >= 0) {
            out.push_back(static_cast<char>((val >> bits) & 0xFF));
            bits -= 8;
        }
    }
    return out;
}

nlohmann::ordered_json box_to_json(const BoundingBox& b) {
    return nlohmann::ordered_json::array({b.x0, b.y0, b.x1, b.y1});
}

BoundingBox box_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4)
        throw DecodeError("malformed record: box is not [x0,y0,x1,y1]");
    return BoundingBox{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(),
                       j[3].get<int>()};
}

}  // namespace

nlohmann::ordered_json image_to_json(const ImageRef& image) {
    nlohmann::ordered_json j;
    j["id"] = image.id;
    j["width"] = image.width;
    j["height"] = image.height;
    nlohmann::ordered_json payload;
    if (image.regions) {
        payload["kind"] = "sim";
        nlohmann::ordered_json ents = nlohmann::ordered_json::array();
        for (const SimRegion& r : *image.regions) {
            nlohmann::ordered_json e;
            e["descriptor"] = r.descriptor;
            e["region"] = box_to_json(r.region);
            ents.push_back(std::move(e));
        }
        payload["entities"] = std::move(ents);
    } else {
        payload["kind"] = "bytes";
        payload["data"] = base64_encode(image.bytes.value_or(""));
    }
    j["payload"] = std::move(payload);
    return j;
}

ImageRef image_from_json(const nlohmann::json& j) {
    ImageRef img;
    img.id = j.at("id").get<std::string>();
    img.width = j.at("width").get<int>();
    img.height = j.at("height").get<int>();
    const auto& payload = j.at("payload");
    const std::string kind = payload.at("kind").get<std::string>();
    if (kind == "sim") {
        std::vector<SimRegion> regions;
        for (const auto& e : payload.at("entities")) {
            regions.push_back(SimRegion{e.at("descriptor").get<std::string>(),
                                        box_from_json(e.at("region"))});
        }
        img.regions = std::move(regions);
    } else if (kind == "bytes") {
        img.bytes = base64_decode(payload.at("data").get<std::string>());
    } else {
        throw DecodeError("malformed record: unknown payload kind");
    }
    return img;
}

nlohmann::ordered_json toolcall_to_json(const ToolCall& call, bool include_id) {
    nlohmann::ordered_json j;
    if (include_id) j["call_id"] = call.call_id;
    j["tool"] = std::string(to_string(call.tool));
    switch (call.tool) {
        case Tool::visual_search: {
            const auto& a = std::get<VisualSearchArgs>(call.args);
            if (!a.image_id.empty()) j["image"] = a.image_id;
            nlohmann::ordered_json crops = nlohmann::ordered_json::array();
            for (const CropSpec& c : a.crops) {
                nlohmann::ordered_json cj;
                cj["box"] = box_to_json(c.box);
                cj["scale"] = c.scale;
                crops.push_back(std::move(cj));
            }
            j["crops"] = std::move(crops);
            break;
        }
        case Tool::web_search:
            j["query"] = std::get<WebSearchArgs>(call.args).query;
            break;
        case Tool::visit_page:
            j["url"] = std::get<VisitPageArgs>(call.args).url;
            break;
        case Tool::summarize_page: {
            const auto& a = std::get<SummarizePageArgs>(call.args);
            j["url"] = a.url;
            j["query"] = a.query;
            break;
        }
        case Tool::code_exec:
            j["source"] = std::get<CodeExecArgs>(call.args).source;
            break;
    }
    return j;
}

ToolCall toolcall_from_json(const nlohmann::json& j) {
    ToolCall call;
    if (j.contains("call_id")) call.call_id = j.at("call_id").get<std::string>();
    call.tool = tool_from_string(j.at("tool").get<std::string>());
    switch (call.tool) {
        case Tool::visual_search: {
            VisualSearchArgs a;
            if (j.contains("image")) a.image_id = j.at("image").get<std::string>();
            for (const auto& cj : j.at("crops")) {
                CropSpec c;
                c.box = box_from_json(cj.at("box"));
                c.scale = cj.value("scale", 1.0);
                a.crops.push_back(c);
            }
            call.args = std::move(a);
            break;
        }
        case Tool::web_search:
            call.args = WebSearchArgs{j.at("query").get<std::string>()};
            break;
        case Tool::visit_page:
            call.args = VisitPageArgs{j.at("url").get<std::string>()};
            break;
        case Tool::summarize_page:
            call.args = SummarizePageArgs{j.at("url").get<std::string>(),
                                          j.value("query", std::string())};
            break;
        case Tool::code_exec:
            call.args = CodeExecArgs{j.at("source").get<std::string>()};
            break;
    }
    return call;
}

nlohmann::ordered_json step_to_json(const Step& step) {
    nlohmann::ordered_json j;
    j["turn"] = step.turn;
    j["phase"] = std::string(to_string(step.phase));
    j["reasoning"] = step.reasoning;
    nlohmann::ordered_json action;
    if (const auto* a = std::get_if<Answer>(&step.action)) {
        action["kind"] = "answer";
        action["text"] = a->text;
    } else {
        action["kind"] = "calls";
        nlohmann::ordered_json calls = nlohmann::ordered_json::array();
        for (const ToolCall& c : *step.calls())
            calls.push_back(toolcall_to_json(c, true));
        action["calls"] = std::move(calls);
    }
    j["action"] = std::move(action);
    nlohmann::ordered_json obs = nlohmann::ordered_json::array();
    for (const Observation& o : step.observations) {
        nlohmann::ordered_json oj;
        oj["for_call"] = o.for_call;
        oj["status"] = std::string(to_string(o.status));
        oj["content"] = o.content;
        oj["sources"] = o.sources;
        oj["latency_ms"] = o.latency_ms;
        obs.push_back(std::move(oj));
    }
    j["observations"] = std::move(obs);
    return j;
}

Step step_from_json(const nlohmann::json& j) {
    Step s;
    s.turn = j.at("turn").get<int>();
    s.phase = phase_from_string(j.at("phase").get<std::string>());
    s.reasoning = j.at("reasoning").get<std::string>();
    const auto& action = j.at("action");
    const std::string kind = action.at("kind").get<std::string>();
    if (kind == "answer") {
        s.action = Answer{action.at("text").get<std::string>()};
    } else if (kind == "calls") {
        std::vector<ToolCall> calls;
        for (const auto& cj : action.at("calls"))
            calls.push_back(toolcall_from_json(cj));
        s.action = std::move(calls);
    } else {
        throw DecodeError("malformed record: unknown action kind");
    }
    for (const auto& oj : j.at("observations")) {
        Observation o;
        o.for_call = oj.at("for_call").get<std::string>();
        o.status = obs_status_from_string(oj.at("status").get<std::string>());
        o.content = oj.at("content").get<std::string>();
        o.sources = oj.at("sources").get<std::vector<std::string>>();
        o.latency_ms = oj.at("latency_ms").get<std::int64_t>();
        s.observations.push_back(std::move(o));
    }
    return s;
}

nlohmann::ordered_json trajectory_to_json(const Trajectory& t) {
    nlohmann::ordered_json j;
    j["vdr_schema"] = kSchemaVersion;
    j["id"] = t.id;
    j["question"] = t.question;
    j["image"] = t.image ? image_to_json(*t.image)
                         : nlohmann::ordered_json(nullptr);
    j["description"] = t.description ? nlohmann::ordered_json(*t.description)
                                     : nlohmann::ordered_json(nullptr);
    j["ground_truth"] = t.ground_truth
                            ? nlohmann::ordered_json(*t.ground_truth)
                            : nlohmann::ordered_json(nullptr);
    j["t_v"] = t.t_v;
    j["termination"] = std::string(to_string(t.termination));
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const Step& s : t.steps) steps.push_back(step_to_json(s));
    j["steps"] = std::move(steps);
    return j;
}

std::string encode_trajectory(const Trajectory& t) {
    if (t.termination == Termination::in_progress)
        throw std::invalid_argument("encode_trajectory: unterminated trajectory");
    auto errs = check_invariants(t);
    if (!errs.empty())
        throw std::invalid_argument("encode_trajectory: " + errs.front());
    return trajectory_to_json(t).dump();
}

Trajectory decode_trajectory(std::string_view line) {
    nlohmann::json j =
        nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw DecodeError("malformed record");
    Trajectory t;
    try {
        if (j.at("vdr_schema").get<int>() != kSchemaVersion)
            throw DecodeError("unsupported schema version");
        t.id = j.at("id").get<std::string>();
        t.question = j.at("question").get<std::string>();
        if (!j.at("image").is_null()) t.image = image_from_json(j.at("image"));
        if (!j.at("description").is_null())
            t.description = j.at("description").get<std::string>();
        if (!j.at("ground_truth").is_null())
            t.ground_truth = j.at("ground_truth").get<std::string>();
        t.t_v = j.at("t_v").get<int>();
        t.termination =
            termination_from_string(j.at("termination").get<std::string>());
        for (const auto& sj : j.at("steps")) t.steps.push_back(step_from_json(sj));
    } catch (const DecodeError&) {
        throw;
    } catch (const std::exception& e) {
        throw DecodeError(std::string("malformed record: ") + e.what());
    }
    auto errs = check_invariants(t);
    if (!errs.empty()) throw DecodeError(errs.front());
    return t;
}

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<Trajectory>& trajectories) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    for (const Trajectory& t : trajectories) out << encode_trajectory(t) << '\n';
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<Trajectory> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(decode_trajectory(line));
    }
    return out;
}

}  // namespace vdr
