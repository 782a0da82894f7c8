#include "geoqa/explainer/graph_query.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <cctype>
#include <set>

namespace geoqa::explainer {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class QueryParser {
public:
    explicit QueryParser(std::string_view s) : s_(s) {}

    GraphQuery parse() {
        reject_unsupported();
        GraphQuery q;
        keyword("MATCH");
        q.from = node();
        if (peek('<')) {
            unsupported("left-pointing relationships are not supported; use the _reverse edge type");
        }
        if (peek('-')) {
            q.edge_type = hop();
            q.to = node();
            if (peek('-') || peek('<')) {
                unsupported("only one hop is supported");
            }
            if (peek(',')) {
                unsupported("only one pattern is supported");
            }
        }
        keyword("RETURN");
        q.projections.push_back(projection());
        while (peek(',')) {
            ++i_;
            q.projections.push_back(projection());
        }
        skip_ws();
        if (peek(';')) {
            ++i_;
        }
        if (!at_end()) {
            fail("unexpected text after RETURN");
        }
        std::set<std::string> vars;
        if (!q.from.var.empty()) {
            vars.insert(q.from.var);
        }
        if (q.to && !q.to->var.empty()) {
            vars.insert(q.to->var);
        }
        for (const auto& p : q.projections) {
            if (!vars.count(p.var)) {
                throw PositionedError(ErrorCode::GraphQuerySyntax, i_, "RETURN uses undeclared variable " + p.var);
            }
        }
        return q;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& why) const { throw PositionedError(ErrorCode::GraphQuerySyntax, i_, why); }
    [[noreturn]] static void unsupported(const std::string& why) { throw Error(ErrorCode::UnsupportedFeature, why); }

    // Scans words outside string literals for clauses the subset lacks.
    void reject_unsupported() const {
        static const std::set<std::string> clauses{"where", "order", "limit", "skip", "with", "optional", "union",
                                                   "create", "merge", "delete", "set", "remove", "unwind", "call"};
        static const std::set<std::string> aggregates{"count", "collect", "sum", "avg", "min", "max", "distinct"};
        char quote = 0;
        for (std::size_t i = 0; i < s_.size();) {
            const char c = s_[i];
            if (quote) {
                if (c == quote) {
                    quote = 0;
                }
                ++i;
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
                ++i;
                continue;
            }
            if (!word_char(c)) {
                ++i;
                continue;
            }
            const std::size_t b = i;
            while (i < s_.size() && word_char(s_[i])) {
                ++i;
            }
            // Words right after ':' or '.' are labels/attributes, not clauses.
            std::size_t k = b;
            while (k > 0 && std::isspace(static_cast<unsigned char>(s_[k - 1]))) {
                --k;
            }
            if (k > 0 && (s_[k - 1] == ':' || s_[k - 1] == '.')) {
                continue;
            }
            const std::string w = text::to_lower(s_.substr(b, i - b));
            if (clauses.count(w)) {
                unsupported(text::to_lower(w) == "where" ? "WHERE is not supported; put conditions in {type:..., id:...}"
                                                         : "clause " + w + " is not supported");
            }
            std::size_t j = i;
            while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) {
                ++j;
            }
            if (aggregates.count(w) && (w == "distinct" || (j < s_.size() && s_[j] == '('))) {
                unsupported("aggregation (" + w + ") is not supported");
            }
        }
    }

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
    std::string name() {
        skip_ws();
        const std::size_t b = i_;
        while (i_ < s_.size() && word_char(s_[i_])) {
            ++i_;
        }
        if (b == i_) {
            fail("expected a name");
        }
        return std::string(s_.substr(b, i_ - b));
    }
    void keyword(const char* kw) {
        skip_ws();
        const std::size_t at = i_;
        const std::string w = i_ < s_.size() && word_char(s_[i_]) ? name() : "";
        if (text::to_lower(w) != text::to_lower(kw)) {
            i_ = at;
            fail(std::string("expected ") + kw);
        }
    }
    std::string string_lit() {
        skip_ws();
        if (i_ >= s_.size() || (s_[i_] != '\'' && s_[i_] != '"')) {
            fail("expected a quoted string");
        }
        const char q = s_[i_++];
        const std::size_t b = i_;
        while (i_ < s_.size() && s_[i_] != q) {
            ++i_;
        }
        if (i_ >= s_.size()) {
            fail("unterminated string");
        }
        return std::string(s_.substr(b, i_++ - b));
    }
    NodePattern node() {
        expect('(');
        NodePattern n;
        skip_ws();
        if (i_ < s_.size() && word_char(s_[i_])) {
            n.var = name();
        }
        if (peek(':')) {
            ++i_;
            n.type = name();
        }
        if (peek('{')) {
            ++i_;
            do {
                const std::size_t at = i_;
                const std::string key = name();
                expect(':');
                const std::string v = string_lit();
                if (key == "type") {
                    n.type = v;
                } else if (key == "id") {
                    n.id = v;
                } else {
                    i_ = at;
                    fail("only type and id can be matched, not " + key);
                }
            } while (peek(',') && ++i_);
            expect('}');
        }
        expect(')');
        return n;
    }
    std::string hop() {
        expect('-');
        if (peek('-')) {
            ++i_;
            expect('>');
            return "";
        }
        expect('[');
        skip_ws();
        if (i_ < s_.size() && word_char(s_[i_])) {
            name();  // relationship variable, unused
        }
        std::string type;
        if (peek(':')) {
            ++i_;
            type = name();
        }
        if (peek('*')) {
            unsupported("variable-length paths are not supported");
        }
        expect(']');
        expect('-');
        if (!peek('>')) {
            unsupported("relationships must point right (->)");
        }
        ++i_;
        return type;
    }
    Projection projection() {
        Projection p;
        p.var = name();
        p.attribute = "id";
        if (peek('.')) {
            ++i_;
            const std::size_t at = i_;
            p.attribute = name();
            if (p.attribute != "id" && p.attribute != "type") {
                i_ = at;
                fail("nodes only have id and type");
            }
        }
        return p;
    }
};

bool node_matches(const store::GraphNode& n, const NodePattern& p) {
    return (!p.type || n.type == *p.type) && (!p.id || n.id == *p.id);
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

std::string node_text(const NodePattern& n) {
    std::string out = "(" + n.var;
    std::vector<std::string> props;
    if (n.type) {
        props.push_back("type:" + quote(*n.type));
    }
    if (n.id) {
        props.push_back("id:" + quote(*n.id));
    }
    if (!props.empty()) {
        out += (n.var.empty() ? "{" : " {") + text::join(props, ", ") + "}";
    }
    return out + ")";
}

}  // namespace

std::string GraphQuery::to_text() const {
    std::string out = "MATCH " + node_text(from);
    if (to) {
        out += edge_type && !edge_type->empty() ? "-[r:" + *edge_type + "]->" : "-->";
        out += node_text(*to);
    }
    std::vector<std::string> ps;
    for (const auto& p : projections) {
        ps.push_back(p.var + "." + p.attribute);
    }
    return out + " RETURN " + text::join(ps, ", ");
}

nlohmann::json GraphRows::to_json() const { return {{"columns", columns}, {"rows", rows}}; }

std::string GraphRows::render() const {
    std::string out;
    for (const auto& r : rows) {
        out += text::join(r, " | ") + "\n";
    }
    return out.empty() ? "(no rows)\n" : out;
}

GraphQuery parse_graph_query(std::string_view text) {
    std::string body(text);
    if (auto block = agent::last_block(text, "cypher")) {
        body = block->body;
    }
    return QueryParser(body).parse();
}

GraphRows run_graph_query(const store::SchemaGraph& graph, const GraphQuery& q) {
    if (q.edge_type && !q.edge_type->empty() && !graph.has_edge_type(*q.edge_type)) {
        throw Error(ErrorCode::UnknownEdgeType, "no edges of type " + *q.edge_type + "; known: " +
                                                    text::join(graph.edge_types(), ", "));
    }
    GraphRows out;
    for (const auto& p : q.projections) {
        out.columns.push_back(p.var + "." + p.attribute);
    }
    auto project = [&](const store::GraphNode* a, const store::GraphNode* b) {
        std::vector<std::string> row;
        for (const auto& p : q.projections) {
            const store::GraphNode* n = p.var == q.from.var ? a : b;
            row.push_back(p.attribute == "id" ? n->id : n->type);
        }
        out.rows.push_back(std::move(row));
    };
    const auto& nodes = graph.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!node_matches(nodes[i], q.from)) {
            continue;
        }
        if (!q.to) {
            project(&nodes[i], nullptr);
            continue;
        }
        for (std::size_t t : graph.neighbors(i, q.edge_type.value_or(""))) {
            if (node_matches(nodes[t], *q.to)) {
                project(&nodes[i], &nodes[t]);
            }
        }
    }
    return out;
}

}  // namespace geoqa::explainer
