#include "geoqa/geometry/wkt.hpp"

#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <cctype>
#include <charconv>

namespace geoqa {

namespace {

class WktReader {
public:
    explicit WktReader(std::string_view text) : text_(text) {}

    Geometry read() {
        skip_ws();
        const std::size_t tag_pos = pos_;
        std::string tag = text::to_lower(read_word());
        if (tag.empty()) {
            fail(tag_pos, "expected geometry tag");
        }
        skip_ws();
        // Z/M dimension markers are outside the supported 2D model.
        if (peek_word_is("z") || peek_word_is("m") || peek_word_is("zm")) {
            throw Error(ErrorCode::UnsupportedKind, "3D/measured " + tag + " is not supported");
        }
        if (peek_word_is("empty")) {
            fail(pos_, "EMPTY geometries are not supported");
        }
        Geometry::Shape shape;
        if (tag == "point") {
            expect('(');
            LonLat c = read_coord();
            expect(')');
            shape = Point{c};
        } else if (tag == "linestring") {
            LineString l;
            l.coords = read_coord_list();
            if (l.coords.size() < 2) {
                fail(pos_, "linestring needs at least 2 positions");
            }
            shape = std::move(l);
        } else if (tag == "polygon") {
            shape = read_polygon();
        } else if (tag == "multipolygon") {
            MultiPolygon m;
            expect('(');
            m.polygons.push_back(read_polygon());
            while (try_consume(',')) {
                m.polygons.push_back(read_polygon());
            }
            expect(')');
            shape = std::move(m);
        } else {
            throw Error(ErrorCode::UnsupportedKind, "geometry kind '" + tag + "' is not supported");
        }
        skip_ws();
        if (pos_ != text_.size()) {
            fail(pos_, "trailing characters after geometry");
        }
        if (auto err = Geometry::validate(shape)) {
            fail(pos_, *err);
        }
        return Geometry(std::move(shape), std::string(text_));
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& reason) {
        throw PositionedError(ErrorCode::MalformedWkt, at, reason);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    std::string read_word() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    bool peek_word_is(std::string_view word) {
        std::size_t save = pos_;
        std::string w = text::to_lower(read_word());
        pos_ = save;
        return w == word;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(pos_, std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double read_number() {
        skip_ws();
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        if (begin != end && *begin == '+') {
            ++begin;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc()) {
            fail(pos_, "expected number");
        }
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    LonLat read_coord() {
        LonLat c;
        c.lon = read_number();
        c.lat = read_number();
        skip_ws();
        if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
            throw Error(ErrorCode::UnsupportedKind, "coordinates with more than 2 dimensions are not supported");
        }
        return c;
    }

    std::vector<LonLat> read_coord_list() {
        std::vector<LonLat> out;
        expect('(');
        out.push_back(read_coord());
        while (try_consume(',')) {
            out.push_back(read_coord());
        }
        expect(')');
        return out;
    }

    Polygon read_polygon() {
        Polygon p;
        expect('(');
        do {
            const std::size_t ring_pos = pos_;
            Ring ring = read_coord_list();
            if (!(ring.front() == ring.back())) {
                fail(ring_pos, "ring not closed");
            }
            if (ring.size() < 4) {
                fail(ring_pos, "ring needs at least 4 positions");
            }
            p.rings.push_back(std::move(ring));
        } while (try_consume(','));
        expect(')');
        return p;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void append_coord(std::string& out, const LonLat& c) {
    out += text::format_number(c.lon);
    out += ' ';
    out += text::format_number(c.lat);
}

void append_coords(std::string& out, const std::vector<LonLat>& coords) {
    out += '(';
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        append_coord(out, coords[i]);
    }
    out += ')';
}

void append_polygon(std::string& out, const Polygon& p) {
    out += '(';
    for (std::size_t i = 0; i < p.rings.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        append_coords(out, p.rings[i]);
    }
    out += ')';
}

}  // namespace

Geometry parse_wkt(std::string_view text) { return WktReader(text).read(); }

std::string to_wkt(const Geometry& geometry) {
    std::string out(to_string(geometry.kind()));
    out += ' ';
    const auto& shape = geometry.shape();
    if (const auto* p = std::get_if<Point>(&shape)) {
        out += '(';
        append_coord(out, p->coord);
        out += ')';
    } else if (const auto* l = std::get_if<LineString>(&shape)) {
        append_coords(out, l->coords);
    } else if (const auto* poly = std::get_if<Polygon>(&shape)) {
        append_polygon(out, *poly);
    } else {
        const auto& m = std::get<MultiPolygon>(shape);
        out += '(';
        for (std::size_t i = 0; i < m.polygons.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            append_polygon(out, m.polygons[i]);
        }
        out += ')';
    }
    return out;
}

}  // namespace geoqa
