#include "geoqa/planner/plan.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace geoqa::planner {

namespace {

std::size_t index_of(const nlohmann::json& r, const char* key, const char* alt, std::size_t n) {
    const nlohmann::json* v = nullptr;
    if (r.contains(key)) {
        v = &r[key];
    } else if (r.contains(alt)) {
        v = &r[alt];
    }
    if (v == nullptr) {
        throw Error(ErrorCode::MalformedSpec, std::string("relation lacks \"") + key + "\"");
    }
    long long i = -1;
    if (v->is_number_integer()) {
        i = v->get<long long>();
    } else if (v->is_string()) {
        try {
            i = std::stoll(v->get<std::string>());
        } catch (const std::exception&) {
        }
    }
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
        throw Error(ErrorCode::MalformedSpec,
                    std::string("relation ") + key + " index " + v->dump() + " is out of range");
    }
    return static_cast<std::size_t>(i);
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Cursor over one code line; errors carry the column.
class LineParser {
public:
    explicit LineParser(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
    }
    bool at_end() {
        skip_ws();
        return i_ >= s_.size();
    }
    bool peek(char c) {
        skip_ws();
        return i_ < s_.size() && s_[i_] == c;
    }
    void expect(char c) {
        if (!peek(c)) {
            fail(std::string("expected '") + c + "'");
        }
        ++i_;
    }
    std::string ident() {
        skip_ws();
        if (i_ >= s_.size() || !is_ident_start(s_[i_])) {
            fail("expected an identifier");
        }
        const std::size_t b = i_;
        while (i_ < s_.size() && (is_ident(s_[i_]) || s_[i_] == '.')) {
            ++i_;
        }
        return std::string(s_.substr(b, i_ - b));
    }
    std::string quoted() {
        skip_ws();
        const char q = s_[i_++];
        std::string out;
        while (i_ < s_.size() && s_[i_] != q) {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
                ++i_;
            }
            out += s_[i_++];
        }
        if (i_ >= s_.size()) {
            fail("unterminated string");
        }
        ++i_;
        return out;
    }
    Arg arg() {
        skip_ws();
        if (i_ >= s_.size()) {
            fail("expected an argument");
        }
        Arg a;
        const char c = s_[i_];
        if (c == '"' || c == '\'') {
            a.kind = Arg::Kind::String;
            a.text = quoted();
            return a;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            const char* first = s_.data() + i_;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
            if (ec != std::errc()) {
                fail("bad number");
            }
            i_ += static_cast<std::size_t>(ptr - first);
            a.kind = Arg::Kind::Number;
            a.number = v;
            a.text = text::format_number(v);
            return a;
        }
        a.kind = Arg::Kind::Variable;
        a.text = ident();
        if (peek('[')) {
            ++i_;
            skip_ws();
            if (i_ >= s_.size() || (s_[i_] != '"' && s_[i_] != '\'')) {
                fail("expected a quoted key");
            }
            a.field = quoted();
            expect(']');
            if (a.field != "subject" && a.field != "object") {
                fail("only ['subject'] and ['object'] can be selected");
            }
        }
        return a;
    }
    std::size_t pos() const { return i_; }
    void set_pos(std::size_t p) { i_ = p; }

    [[noreturn]] void fail(const std::string& why) const { throw PositionedError(ErrorCode::CallSyntax, i_, why); }

private:
    std::string_view s_;
    std::size_t i_ = 0;
};

std::string strip_comment(std::string_view line) {
    bool in_str = false;
    char q = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_str) {
            if (c == '\\') {
                ++i;
            } else if (c == q) {
                in_str = false;
            }
        } else if (c == '"' || c == '\'') {
            in_str = true;
            q = c;
        } else if (c == '#') {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

void check_arity(const Call& c) {
    auto want = [&](std::size_t n, const std::vector<Arg::Kind>& kinds) {
        if (c.args.size() != n) {
            throw Error(ErrorCode::CallSyntax, c.function + " takes " + std::to_string(n) + " argument(s), got " +
                                                   std::to_string(c.args.size()));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (c.args[i].kind != kinds[i]) {
                throw Error(ErrorCode::CallSyntax, c.function + ": argument " + std::to_string(i + 1) + " has the wrong type");
            }
        }
    };
    if (c.function == kSetBoundingBox || c.function == kIdListOfEntity) {
        want(1, {Arg::Kind::String});
    } else if (c.function == kGeoFilter) {
        want(3, {Arg::Kind::String, Arg::Kind::Variable, Arg::Kind::Variable});
    }
}

std::string describe(const Call& c) {
    if (c.function == kSetBoundingBox) {
        return c.args[0].text.empty() ? "Search without a bounding box" : "Set the bounding box to " + c.args[0].text;
    }
    if (c.function == kIdListOfEntity) {
        return "Get the id_list of " + c.args[0].text;
    }
    if (c.function == kGeoFilter) {
        return "Filter " + c.args[1].text + " " + c.args[0].text + " " + c.args[2].text;
    }
    return "Get " + c.args[0].text + "['" + c.args[0].field + "']";
}

}  // namespace

RelationSpec RelationSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("entities") || !j["entities"].is_array()) {
        throw Error(ErrorCode::MalformedSpec, "relation answer lacks an \"entities\" list");
    }
    RelationSpec spec;
    for (const auto& e : j["entities"]) {
        std::string t;
        if (e.is_string()) {
            t = e.get<std::string>();
        } else if (e.is_object() && e.contains("entity_text") && e["entity_text"].is_string()) {
            t = e["entity_text"].get<std::string>();
        }
        t = text::collapse_whitespace(t);
        if (t.empty()) {
            throw Error(ErrorCode::MalformedSpec, "entity without entity_text: " + e.dump());
        }
        spec.entities.push_back(t);
    }
    if (j.contains("spatial_relations") && !j["spatial_relations"].is_null()) {
        if (!j["spatial_relations"].is_array()) {
            throw Error(ErrorCode::MalformedSpec, "\"spatial_relations\" is not a list");
        }
        for (const auto& r : j["spatial_relations"]) {
            if (!r.is_object() || !r.contains("type") || !r["type"].is_string()) {
                throw Error(ErrorCode::MalformedSpec, "relation without a type: " + r.dump());
            }
            const std::size_t n = spec.entities.size();
            spec.spatial_relations.push_back({text::collapse_whitespace(r["type"].get<std::string>()),
                                              index_of(r, "subject", "head", n), index_of(r, "object", "tail", n)});
        }
    }
    if (j.contains("region") && j["region"].is_string()) {
        spec.region = text::collapse_whitespace(j["region"].get<std::string>());
    }
    return spec;
}

nlohmann::json RelationSpec::to_json() const {
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : entities) {
        ents.push_back({{"entity_text", e}});
    }
    nlohmann::json rels = nlohmann::json::array();
    for (const auto& r : spatial_relations) {
        rels.push_back({{"type", r.type}, {"subject", r.subject}, {"object", r.object}});
    }
    return {{"entities", ents}, {"spatial_relations", rels}, {"region", region}};
}

std::string Call::to_text() const {
    if (function == kSelect) {
        return args.at(0).text + "['" + args.at(0).field + "']";
    }
    std::vector<std::string> parts;
    for (const auto& a : args) {
        switch (a.kind) {
            case Arg::Kind::String: parts.push_back(nlohmann::json(a.text).dump()); break;
            case Arg::Kind::Number: parts.push_back(a.text); break;
            case Arg::Kind::Variable: parts.push_back(a.field.empty() ? a.text : a.text + "['" + a.field + "']"); break;
        }
    }
    return function + "(" + text::join(parts, ", ") + ")";
}

nlohmann::json PlanStep::to_json() const {
    return {{"description", description}, {"call", call.to_text()}, {"function", call.function}, {"output", output_name}};
}

nlohmann::json TaskPlan::to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : steps) {
        a.push_back(s.to_json());
    }
    return a;
}

PlanStep parse_call_text(std::string_view line, const std::set<std::string>* known) {
    const std::string code = strip_comment(line);
    LineParser p(code);
    PlanStep step;
    // Optional "name =" prefix.
    const std::size_t start = p.pos();
    if (!p.at_end() && is_ident_start(code[p.pos()])) {
        const std::string first = p.ident();
        if (p.peek('=')) {
            p.expect('=');
            step.output_name = first;
        } else {
            p.set_pos(start);
        }
    }
    const std::string fn = p.ident();
    if (p.peek('[')) {
        // name = var['subject']
        p.set_pos(p.pos() - fn.size());
        Arg a = p.arg();
        if (a.field.empty()) {
            p.fail("expected ['subject'] or ['object']");
        }
        step.call = {kSelect, {a}};
    } else {
        if (!p.peek('(')) {
            p.fail("expected a function call");
        }
        if (fn != kSetBoundingBox && fn != kIdListOfEntity && fn != kGeoFilter) {
            throw Error(ErrorCode::NonWhitelistedCall, "call to " + fn + " is not allowed");
        }
        step.call.function = fn;
        p.expect('(');
        if (!p.peek(')')) {
            step.call.args.push_back(p.arg());
            while (p.peek(',')) {
                p.expect(',');
                if (p.peek(')')) {
                    break;
                }
                step.call.args.push_back(p.arg());
            }
        }
        p.expect(')');
        check_arity(step.call);
    }
    if (!p.at_end()) {
        p.fail("unexpected text after the call");
    }
    if (known != nullptr) {
        for (const auto& a : step.call.args) {
            if (a.kind == Arg::Kind::Variable && !known->count(a.text)) {
                throw Error(ErrorCode::UnknownVariable, "variable " + a.text + " is not defined");
            }
        }
    }
    step.description = describe(step.call);
    return step;
}

TaskPlan parse_plan(std::string_view planner_text, const std::set<std::string>& session_vars) {
    std::string code(planner_text);
    if (auto block = agent::last_block(planner_text)) {
        code = block->body;
    }
    TaskPlan plan;
    std::set<std::string> known = session_vars;
    std::string pending_comment;
    std::istringstream in(code);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = text::collapse_whitespace(line);
        if (t.empty()) {
            continue;
        }
        if (t[0] == '#') {
            pending_comment = text::collapse_whitespace(t.substr(1));
            continue;
        }
        PlanStep step = parse_call_text(t, &known);
        if (!pending_comment.empty()) {
            step.description = pending_comment;
            pending_comment.clear();
        }
        if (step.output_name.empty()) {
            step.output_name = "step_" + std::to_string(plan.steps.size() + 1);
        }
        known.insert(step.output_name);
        plan.steps.push_back(std::move(step));
    }
    if (plan.steps.empty()) {
        throw Error(ErrorCode::UnplannableSpec, "planner produced no steps");
    }
    return plan;
}

}  // namespace geoqa::planner
