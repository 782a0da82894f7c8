#include "geoqa/agent/gateway.hpp"
#include "geoqa/agent/json_extract.hpp"
#include "geoqa/agent/prompts.hpp"
#include "geoqa/agent/transcript.hpp"
#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <doctest.h>

#include <deque>
#include <random>

using namespace geoqa;
using namespace geoqa::agent;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

// Replays a fixed queue of outcomes: text, or an error code to throw.
class QueueBackend : public CompletionBackend {
public:
    struct Step {
        std::string text;
        std::optional<ErrorCode> error;
        TokenUsage usage;
    };
    std::deque<Step> steps;
    std::vector<CompletionRequest> seen;

    CompletionResponse complete(const CompletionRequest& req, const std::string&) override {
        seen.push_back(req);
        REQUIRE(!steps.empty());
        Step s = steps.front();
        steps.pop_front();
        if (s.error) {
            throw Error(*s.error, "scripted failure");
        }
        return {s.text, s.usage};
    }
};

Transcript router_transcript() {
    return Transcript::from_json(nlohmann::json::parse(R"j([
      {"role": "Router",
       "input": "I want to know which buildings are within 100m of the forest.",
       "response": "The user asks for new spatial calculations.\n```json\n{\n    \"Receiver\": \"Analyzer\",\n}\n```",
       "usage": {"input_tokens": 100, "output_tokens": 20}},
      {"role": "Router",
       "input": "I want to know what data I have.",
       "response": "This is about existing data.\n```json\n{\"Receiver\": \"Explainer\"}\n```",
       "usage": {"input_tokens": 50, "output_tokens": 5}}
    ])j"));
}

}  // namespace

TEST_CASE("render_prompt substitutes slots") {
    const auto router = render_prompt(AgentRole::Router, {});
    CHECK(router.find("directing incoming prompts to either the Analyzer or the Explainer") != std::string::npos);

    const auto intent = render_prompt(AgentRole::IntentMatcher, {{"tables", "soil, roads"}});
    CHECK(intent.find("soil, roads") != std::string::npos);
    CHECK(intent.find("{{") == std::string::npos);

    CHECK(code_of([] { render_prompt(AgentRole::MissionPlanner, {}); }) == ErrorCode::MissingSlot);
    const auto planner = render_prompt(AgentRole::MissionPlanner, {{"tools", std::string(default_tool_catalog())}});
    CHECK(planner.find("You have following tools available") != std::string::npos);
    CHECK(planner.find("1.set_bounding_box(address):") != std::string::npos);
    CHECK(planner.find("3.geo_filter('their geo_relation',id_list_subject, id_list_object):") != std::string::npos);
    CHECK(planner.find("Variable in history is available to call.") != std::string::npos);
}

TEST_CASE("every role has a template and declares its slots") {
    for (AgentRole r : kAllRoles) {
        CHECK_FALSE(prompt_template(r).empty());
        CHECK(parse_role(to_string(r)) == r);
        Slots slots;
        for (const auto& s : template_slots(r)) {
            slots[s] = "x";
        }
        CHECK_NOTHROW(render_prompt(r, slots));
    }
    CHECK(template_slots(AgentRole::Router).empty());
    CHECK(template_slots(AgentRole::MissionPlanner) == std::vector<std::string>{"tools"});
}

TEST_CASE("extract_json takes the last fenced block") {
    CHECK(extract_json("reasoning...\n```json\n{\"Receiver\": \"Analyzer\"}\n```") ==
          nlohmann::json{{"Receiver", "Analyzer"}});
    CHECK(code_of([] { extract_json("plain prose, no braces"); }) == ErrorCode::NoJsonFound);
    CHECK(extract_json("```json\n{\"a\": 1}\n```\nthen\n```json\n{\"a\": 2}\n```") == nlohmann::json{{"a", 2}});
    CHECK(extract_json("{\"a\": [1, 2]}") == nlohmann::json{{"a", {1, 2}}});
    CHECK(extract_json("The answer is {\"a\": 3} as shown.") == nlohmann::json{{"a", 3}});
}

TEST_CASE("extract_json tolerates common near-JSON") {
    const auto v = extract_json("```json\n{'entity_text': 'soil', \"flag\": True, \"n\": None, \"xs\": [1, 2,],}\n```");
    CHECK(v["entity_text"] == "soil");
    CHECK(v["flag"] == true);
    CHECK(v["n"].is_null());
    CHECK(v["xs"] == nlohmann::json{1, 2});
    CHECK(extract_json("```\n{'q': 'it\\'s \"x\"'}\n```")["q"] == "it's \"x\"");
}

TEST_CASE("extract_json reports syntax errors with a position") {
    try {
        extract_json("```json\n{\"a\": 1 \"b\"}\n```");
        FAIL("expected JsonSyntax");
    } catch (const PositionedError& e) {
        CHECK(e.code() == ErrorCode::JsonSyntax);
        // offset of the closing quote of the unexpected "b" token
        CHECK(e.position() == 18);
    }
}

TEST_CASE("extract_json ignores prose before the final fence") {
    std::mt19937 rng(1);
    const std::string block = "```json\n{\"k\": [true, 2]}\n```";
    const auto expected = extract_json(block);
    const std::string alphabet = "abc {}[]\"',:\n xyz";
    for (int i = 0; i < 200; ++i) {
        std::string prose;
        const int n = std::uniform_int_distribution<int>(0, 80)(rng);
        for (int k = 0; k < n; ++k) {
            prose += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        }
        CHECK(extract_json(prose + "\n" + block) == expected);
    }
}

TEST_CASE("fenced_blocks reads language tags") {
    const auto blocks = fenced_blocks("a\n```cypher\nMATCH (n) RETURN n.id\n```\nb\n```chart\n{}\n```");
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].lang == "cypher");
    CHECK(blocks[0].body == "\nMATCH (n) RETURN n.id\n");
    CHECK(last_block("```python\nx\n```\n```json\n{}\n```", "python")->body == "\nx\n");
    CHECK_FALSE(last_block("no fences").has_value());
}

TEST_CASE("scripted backend replays transcript entries") {
    auto backend = std::make_shared<ScriptedBackend>(router_transcript());
    AgentGateway gw(backend, {0, std::chrono::milliseconds(0)});
    gw.open_session("s");
    CHECK(gw.usage_report("s") == TokenUsage{0, 0});

    CompletionRequest req{AgentRole::Router, "I want to know which buildings are within 100m of the forest.", {}, 0.0, {}};
    const auto a = gw.complete_json("s", req);
    CHECK(a["Receiver"] == "Analyzer");

    // Whitespace differences do not change the key.
    req.user_content = "  I want to know   what data I have. ";
    CHECK(gw.complete_json("s", req)["Receiver"] == "Explainer");
    CHECK(gw.usage_report("s") == TokenUsage{150, 25});

    const auto r1 = gw.complete("t", req);
    const auto r2 = gw.complete("t", req);
    CHECK(r1.text == r2.text);
    CHECK(gw.usage_report("t") == TokenUsage{100, 10});

    req.user_content = "something unseen";
    CHECK(code_of([&] { gw.complete("s", req); }) == ErrorCode::TranscriptMiss);
    CHECK(code_of([&] { gw.usage_report("nobody"); }) == ErrorCode::UnknownSession);
    CHECK(backend->served().size() == 4);
}

TEST_CASE("transcript loading validates digests and conflicts") {
    const std::string digest = input_digest("hello   world");
    CHECK(digest == text::sha256_hex("hello world"));
    auto j = nlohmann::json::parse(R"j([{"role": "Router", "input": "hi", "input_digest": "00", "response": "x"}])j");
    CHECK(code_of([&] { Transcript::from_json(j); }) == ErrorCode::InvalidArgument);
    auto conflict = nlohmann::json::parse(
        R"j([{"role": "Router", "input": "hi", "response": "x"}, {"role": "Router", "input": "hi", "response": "y"}])j");
    CHECK(code_of([&] { Transcript::from_json(conflict); }) == ErrorCode::InvalidArgument);
    auto same_input_other_role = nlohmann::json::parse(
        R"j([{"role": "Router", "input": "hi", "response": "x"}, {"role": "Explainer", "input": "hi", "response": "y"}])j");
    CHECK(Transcript::from_json(same_input_other_role).size() == 2);

    const auto t = router_transcript();
    const auto round = Transcript::from_json(t.to_json());
    REQUIRE(round.size() == t.size());
    CHECK(round.entries()[0].response == t.entries()[0].response);
    CHECK(round.entries()[1].usage == t.entries()[1].usage);
}

TEST_CASE("gateway retries transient failures then gives up") {
    auto q = std::make_shared<QueueBackend>();
    q->steps = {{"", ErrorCode::BackendUnavailable, {}}, {"", ErrorCode::RateLimited, {}}, {"ok", std::nullopt, {3, 4}}};
    AgentGateway gw(q, {3, std::chrono::milliseconds(0)});
    CHECK(gw.complete("s", {AgentRole::Router, "x", {}, 0.0, {}}).text == "ok");
    CHECK(gw.usage_report("s") == TokenUsage{3, 4});

    q->steps = {{"", ErrorCode::BackendUnavailable, {}}, {"", ErrorCode::BackendUnavailable, {}}};
    AgentGateway once(q, {1, std::chrono::milliseconds(0)});
    CHECK(code_of([&] { once.complete("s", {AgentRole::Router, "x", {}, 0.0, {}}); }) == ErrorCode::BackendUnavailable);

    q->steps = {{"", ErrorCode::TranscriptMiss, {}}};
    CHECK(code_of([&] { gw.complete("s", {AgentRole::Router, "x", {}, 0.0, {}}); }) == ErrorCode::TranscriptMiss);
}

TEST_CASE("complete_json re-asks once for missing JSON") {
    auto q = std::make_shared<QueueBackend>();
    q->steps = {{"no json here", std::nullopt, {1, 1}}, {"```json\n{\"ok\": 1}\n```", std::nullopt, {2, 2}}};
    AgentGateway gw(q, {0, std::chrono::milliseconds(0)});
    std::string raw;
    CHECK(gw.complete_json("s", {AgentRole::Router, "question", {}, 0.0, {}}, &raw) == nlohmann::json{{"ok", 1}});
    CHECK(raw.find("```json") != std::string::npos);
    REQUIRE(q->seen.size() == 2);
    CHECK(q->seen[1].user_content == "question" + std::string(kReaskNote));
    CHECK(q->seen[1].context.size() == 2);
    CHECK(gw.usage_report("s") == TokenUsage{3, 3});

    q->steps = {{"```json\n{bad\n```", std::nullopt, {}}, {"still none", std::nullopt, {}}};
    CHECK(code_of([&] { gw.complete_json("s", {AgentRole::Router, "question", {}, 0.0, {}}); }) == ErrorCode::JsonSyntax);
}

TEST_CASE("recording backend captures served answers") {
    auto q = std::make_shared<QueueBackend>();
    q->steps = {{"a", std::nullopt, {1, 2}}};
    auto rec = std::make_shared<RecordingBackend>(q);
    AgentGateway gw(rec, {0, std::chrono::milliseconds(0)});
    gw.complete("s", {AgentRole::ModifyAgent, "around 100 meters of", {}, 0.0, {}});
    const auto t = rec->recorded();
    REQUIRE(t.size() == 1);
    CHECK(t.find(AgentRole::ModifyAgent, input_digest("around 100 meters of"))->response == "a");
}
