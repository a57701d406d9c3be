#include <doctest.h>

#include <random>

#include "vdr/react.hpp"
#include "vdr/serialize.hpp"
#include "vdr/trajectory.hpp"

using namespace vdr;

namespace {

Step call_step(int turn, Phase phase, const std::string& reasoning,
               std::vector<ToolCall> calls, std::vector<Observation> obs) {
    Step s;
    s.turn = turn;
    s.phase = phase;
    s.reasoning = reasoning;
    s.action = std::move(calls);
    s.observations = std::move(obs);
    return s;
}

Step answer_step(int turn, Phase phase, const std::string& reasoning,
                 const std::string& answer) {
    Step s;
    s.turn = turn;
    s.phase = phase;
    s.reasoning = reasoning;
    s.action = Answer{answer};
    return s;
}

ToolCall search_call(const std::string& id, const std::string& query) {
    ToolCall c;
    c.call_id = id;
    c.tool = Tool::web_search;
    c.args = WebSearchArgs{query};
    return c;
}

Observation ok_obs(const std::string& for_call, const std::string& content) {
    Observation o;
    o.for_call = for_call;
    o.status = ObsStatus::ok;
    o.content = content;
    return o;
}

Step small_text_step(int turn) {
    return call_step(turn, Phase::text, "r", {search_call("c1", "q")},
                     {ok_obs("c1", "result")});
}

Trajectory sample_trajectory() {
    Trajectory t;
    t.id = "traj-1";
    t.question = "What is the name of the cat in the image?";
    t.ground_truth = "Momo";
    t.image = make_sim_image("img-1", 100, 80,
                             {SimRegion{"cat Momo", {10, 10, 40, 40}}});
    ToolCall vs;
    vs.call_id = "c1";
    vs.tool = Tool::visual_search;
    vs.args = VisualSearchArgs{"img-1", {CropSpec{{10, 10, 40, 40}, 1.5}}};
    Step s1 = call_step(1, Phase::vision, "look at the cat", {vs},
                        {ok_obs("c1", "page says the cat is Momo")});
    Step s2 = call_step(2, Phase::text, "confirm via search",
                        {search_call("c1", "Momo cat")},
                        {ok_obs("c1", "Momo is a cat")});
    Step s3 = answer_step(3, Phase::text, "enough evidence", "Momo");
    Budgets b;
    Trajectory out = t;
    REQUIRE(append_step(out, s1, b) == AppendStatus::accepted);
    REQUIRE(append_step(out, s2, b) == AppendStatus::accepted);
    REQUIRE(append_step(out, s3, b) == AppendStatus::accepted);
    out.termination = Termination::answered;
    return out;
}

}  // namespace

TEST_CASE("count_tokens ceiling of bytes over four") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("12345678") == 2);   // 8 bytes
    CHECK(count_tokens("123456789") == 3);  // 9 bytes
    CHECK(count_tokens("1") == 1);
    CHECK(count_tokens("1234") == 1);
    CHECK(count_tokens("12345") == 2);
}

TEST_CASE("append_step enforces max_turns at exactly the budget") {
    Budgets b;
    b.max_turns = 50;
    b.max_context_tokens = 1u << 20;
    Trajectory t;
    t.id = "t";
    t.question = "q";
    for (int turn = 1; turn <= 49; ++turn)
        REQUIRE(append_step(t, small_text_step(turn), b) ==
                AppendStatus::accepted);
    CHECK(append_step(t, small_text_step(50), b) == AppendStatus::accepted);
    CHECK(t.steps.size() == 50);
    CHECK(append_step(t, small_text_step(51), b) ==
          AppendStatus::max_turns_exceeded);
    CHECK(t.steps.size() == 50);  // rejected step not appended
}

TEST_CASE("append_step base case and turn contiguity") {
    Budgets b;
    Trajectory t;
    CHECK(append_step(t, small_text_step(1), b) == AppendStatus::accepted);
    CHECK_THROWS_AS(append_step(t, small_text_step(5), b),
                    std::invalid_argument);
    Trajectory fresh;
    CHECK_THROWS_AS(append_step(fresh, small_text_step(2), b),
                    std::invalid_argument);
}

TEST_CASE("append_step enforces single-turn token budget") {
    Budgets b;
    b.max_turn_tokens = 4096;
    Trajectory t;
    // reasoning + rendered action above 4096 tokens = 16384 bytes
    std::string big(17000, 'x');
    Step s = answer_step(1, Phase::text, big, "a");
    CHECK(append_step(t, s, b) == AppendStatus::max_turn_tokens_exceeded);
    CHECK(t.steps.empty());
}

TEST_CASE("append_step enforces context budget") {
    Budgets b;
    b.max_context_tokens = 300;
    Trajectory t;
    t.question = "q";
    Step s1 = call_step(1, Phase::text, std::string(600, 'a'),
                        {search_call("c1", "q")}, {ok_obs("c1", "r")});
    CHECK(append_step(t, s1, b) == AppendStatus::accepted);
    Step s2 = call_step(2, Phase::text, std::string(600, 'b'),
                        {search_call("c1", "q")}, {ok_obs("c1", "r")});
    CHECK(append_step(t, s2, b) == AppendStatus::max_context_exceeded);
}

TEST_CASE("append_step rejects phase regression") {
    Budgets b;
    Trajectory t;
    REQUIRE(append_step(t, small_text_step(1), b) == AppendStatus::accepted);
    Step vision = call_step(
        2, Phase::vision, "r",
        {[] {
            ToolCall c;
            c.call_id = "c1";
            c.tool = Tool::visual_search;
            c.args = VisualSearchArgs{"", {CropSpec{{0, 0, 1, 1}, 1.0}}};
            return c;
        }()},
        {ok_obs("c1", "x")});
    CHECK_THROWS_AS(append_step(t, vision, b), std::invalid_argument);
}

TEST_CASE("budget soundness under random append sequences") {
    std::mt19937 rng(7);
    for (int round = 0; round < 50; ++round) {
        Budgets b;
        b.max_turns = 1 + rng() % 12;
        b.max_context_tokens = 50 + rng() % 500;
        b.max_turn_tokens = 20 + rng() % 100;
        Trajectory t;
        t.question = "q";
        auto counter = default_token_counter();
        for (int turn = 1, i = 0; i < 40; ++i) {
            Step s = call_step(turn, Phase::text,
                               std::string(rng() % 400, 'x'),
                               {search_call("c1", "q")},
                               {ok_obs("c1", std::string(1 + rng() % 200, 'o'))});
            if (append_step(t, s, b, counter) == AppendStatus::accepted) ++turn;
        }
        CHECK(static_cast<int>(t.steps.size()) <= b.max_turns);
        CHECK(context_tokens(t, counter) <= b.max_context_tokens);
        for (const Step& s : t.steps)
            CHECK(counter(step_response_text(s)) <= b.max_turn_tokens);
    }
}

TEST_CASE("trajectory round-trips through canonical encoding") {
    Trajectory t = sample_trajectory();
    std::string line1 = encode_trajectory(t);
    Trajectory back = decode_trajectory(line1);
    CHECK(back == t);
    std::string line2 = encode_trajectory(back);
    CHECK(line1 == line2);  // byte-stable
    CHECK(line1.find('\n') == std::string::npos);
}

TEST_CASE("decode rejects phase-ordering violations by name") {
    Trajectory t = sample_trajectory();
    std::string line = encode_trajectory(t);
    auto j = nlohmann::json::parse(line);
    // swap a vision step after the text steps
    std::swap(j["steps"][0], j["steps"][1]);
    j["steps"][0]["turn"] = 1;
    j["steps"][1]["turn"] = 2;
    try {
        decode_trajectory(j.dump());
        FAIL("expected decode error");
    } catch (const DecodeError& e) {
        CHECK(std::string(e.what()).find("phase ordering") !=
              std::string::npos);
    }
}

TEST_CASE("decode rejects truncated and malformed records") {
    Trajectory t = sample_trajectory();
    std::string line = encode_trajectory(t);
    try {
        decode_trajectory(line.substr(0, line.size() / 2));
        FAIL("expected decode error");
    } catch (const DecodeError& e) {
        CHECK(std::string(e.what()).find("malformed record") !=
              std::string::npos);
    }
    CHECK_THROWS_AS(decode_trajectory("{}"), DecodeError);
    CHECK_THROWS_AS(decode_trajectory("not json at all"), DecodeError);
}

TEST_CASE("decode rejects t_v mismatch and bad termination") {
    Trajectory t = sample_trajectory();
    auto j = nlohmann::json::parse(encode_trajectory(t));
    j["t_v"] = 2;
    CHECK_THROWS_AS(decode_trajectory(j.dump()), DecodeError);
    j["t_v"] = 1;
    j["termination"] = "in_progress";
    CHECK_THROWS_AS(decode_trajectory(j.dump()), DecodeError);
}

TEST_CASE("encode refuses unterminated or invalid trajectories") {
    Trajectory t = sample_trajectory();
    t.termination = Termination::in_progress;
    CHECK_THROWS_AS(encode_trajectory(t), std::invalid_argument);
    t.termination = Termination::answered;
    t.t_v = 9;
    CHECK_THROWS_AS(encode_trajectory(t), std::invalid_argument);
}

TEST_CASE("recovery steps are representable and validate") {
    Budgets b;
    Trajectory t;
    t.question = "q";
    Step r = make_recovery_step(1, Phase::text, "garbled output");
    CHECK(r.is_recovery());
    CHECK(append_step(t, r, b) == AppendStatus::accepted);
    t.termination = Termination::error_cascade;
    Trajectory back = decode_trajectory(encode_trajectory(t));
    CHECK(back.steps[0].is_recovery());
    CHECK(back.steps[0].observations[0].content == kFormatErrorContent);
}

TEST_CASE("jsonl file io round-trips") {
    auto dir = std::filesystem::temp_directory_path() / "vdr_core_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "trajs.jsonl";
    std::vector<Trajectory> ts{sample_trajectory(), sample_trajectory()};
    ts[1].id = "traj-2";
    write_trajectories(path, ts);
    auto back = read_trajectories(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == ts[0]);
    CHECK(back[1] == ts[1]);
    std::filesystem::remove_all(dir);
}
