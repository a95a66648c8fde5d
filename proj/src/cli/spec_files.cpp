#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "graze/cli.hpp"
#include "graze/error.hpp"

namespace graze::cli {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

// Key/value lines of one spec file. Repeatable keys keep every occurrence.
struct SpecLines {
    std::string source;
    std::map<std::string, Entry> single;
    std::map<std::string, std::vector<Entry>> repeated;
    int last_line = 0;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        std::ostringstream os;
        os << source << ":" << line << ": " << msg;
        throw Error(ErrorCode::ParseError, os.str());
    }

    const Entry* find(const std::string& key) const {
        auto it = single.find(key);
        return it == single.end() ? nullptr : &it->second;
    }

    const Entry& require(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) fail(last_line, "missing required key '" + key + "'");
        return *e;
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

SpecLines read_lines(std::istream& in, const std::string& source, const std::set<std::string>& keys,
                     const std::set<std::string>& repeatable) {
    SpecLines spec;
    spec.source = source;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) spec.fail(line, "expected 'key = value', got '" + text + "'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) spec.fail(line, "empty key");
        if (!keys.count(key) && !repeatable.count(key)) spec.fail(line, "unknown key '" + key + "'");
        if (value.empty()) spec.fail(line, "empty value for '" + key + "'");
        if (repeatable.count(key)) {
            spec.repeated[key].push_back({value, line});
        } else {
            if (spec.single.count(key)) spec.fail(line, "duplicate key '" + key + "'");
            spec.single[key] = {value, line};
        }
    }
    spec.last_line = line;
    if (in.bad()) throw Error(ErrorCode::IoError, source + ": read failed");
    return spec;
}

std::vector<double> numbers(const SpecLines& spec, const Entry& e) {
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string tok;
    while (is >> tok) {
        double x = 0.0;
        const char* first = tok.data();
        const char* last = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || ptr != last) spec.fail(e.line, "not a number: '" + tok + "'");
        if (!std::isfinite(x)) spec.fail(e.line, "non-finite number: '" + tok + "'");
        out.push_back(x);
    }
    return out;
}

double one_number(const SpecLines& spec, const Entry& e) {
    const auto v = numbers(spec, e);
    if (v.size() != 1) spec.fail(e.line, "expected a single number");
    return v[0];
}

int positive_int(const SpecLines& spec, const Entry& e) {
    const double x = one_number(spec, e);
    if (x < 1 || x != static_cast<int>(x)) spec.fail(e.line, "expected a positive integer");
    return static_cast<int>(x);
}

// `dim` is the ambient dimension n >= 2; surfaces carry n - 1 tangential variables.
int tangential_dim(const SpecLines& spec, const Entry& e) {
    const int n = positive_int(spec, e);
    if (n < 2) spec.fail(e.line, "dim is the ambient dimension and must be at least 2");
    return n - 1;
}

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

// Library errors raised while building the object are re-anchored at the
// line that introduced the offending value.
template <class Fn>
auto anchored(const SpecLines& spec, int line, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        std::ostringstream os;
        os << spec.source << ":" << line << ": " << e.detail();
        throw Error(e.code(), os.str());
    }
}

Obstacle build_polynomial(const SpecLines& spec, double radius) {
    const int d = tangential_dim(spec, spec.require("dim"));
    auto it = spec.repeated.find("term");
    if (it == spec.repeated.end()) spec.fail(spec.last_line, "polynomial obstacle needs at least one 'term'");
    std::vector<Term> terms;
    std::map<MultiIndex, int> seen;
    for (const Entry& e : it->second) {
        const auto v = numbers(spec, e);
        if (static_cast<int>(v.size()) != d + 1)
            spec.fail(e.line, "term needs a coefficient and " + std::to_string(d) + " exponents (e2 .. en)");
        MultiIndex alpha;
        for (int i = 1; i <= d; ++i) {
            if (v[i] < 0 || v[i] != static_cast<int>(v[i])) spec.fail(e.line, "exponents must be nonnegative integers");
            alpha.push_back(static_cast<int>(v[i]));
        }
        if (auto prev = seen.find(alpha); prev != seen.end())
            spec.fail(e.line, "repeats the monomial of line " + std::to_string(prev->second));
        seen[alpha] = e.line;
        int degree = 0;
        for (int a : alpha) degree += a;
        if (degree == 1 && v[0] != 0.0) spec.fail(e.line, "degree-one term: the apex slope grad F(0) must vanish");
        if (degree == 0 && v[0] != 1.0) spec.fail(e.line, "constant term must be 1 (F(0) = 1)");
        terms.push_back({alpha, v[0]});
    }
    const int line = it->second.front().line;
    return anchored(spec, line, [&] { return Obstacle::polynomial(Polynomial(d, terms), radius); });
}

Obstacle build_symmetric(const SpecLines& spec, double radius) {
    const Entry* he = spec.find("h");
    const Entry* ce = spec.find("hcoeffs");
    if (he && ce) spec.fail(ce->line, "give either 'h = exp-flat' or 'hcoeffs', not both");
    if (!he && !ce) spec.fail(spec.last_line, "symmetric-h obstacle needs 'hcoeffs = c1 c2 ...' or 'h = exp-flat'");
    std::optional<HProfile> h;
    int profile_line = 0;
    if (he) {
        if (he->value != "exp-flat") spec.fail(he->line, "the only named profile is 'h = exp-flat'");
        h = HProfile::exp_flat();
        profile_line = he->line;
    } else {
        const auto c = numbers(spec, *ce);
        h = anchored(spec, ce->line, [&] { return HProfile::series(c); });
        profile_line = ce->line;
    }

    int d = 0;
    if (const Entry* de = spec.find("dim")) d = tangential_dim(spec, *de);
    Mat lambda;
    if (const Entry* le = spec.find("lambda")) {
        const auto v = numbers(spec, *le);
        int k = 1;
        while (k * k < static_cast<int>(v.size())) ++k;
        if (k * k != static_cast<int>(v.size())) spec.fail(le->line, "lambda must list a square matrix row by row");
        if (d != 0 && k != d) spec.fail(le->line, "lambda size does not match dim");
        d = k;
        lambda.resize(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) lambda(r, c) = v[r * k + c];
    } else {
        if (d == 0) spec.fail(spec.last_line, "symmetric obstacle needs 'dim' or 'lambda'");
        lambda = Mat::Identity(d, d);
    }
    const int line = spec.find("lambda") ? spec.find("lambda")->line : profile_line;
    return anchored(spec, line, [&] { return Obstacle::symmetric(*h, lambda, radius); });
}

}  // namespace

Obstacle parse_obstacle(std::istream& in, const std::string& source) {
    const SpecLines spec = read_lines(in, source, {"kind", "dim", "h", "hcoeffs", "lambda", "name", "radius"}, {"term"});
    const Entry& kind = spec.require("kind");
    double radius = 1.0;
    if (const Entry* re = spec.find("radius")) {
        radius = one_number(spec, *re);
        if (!(radius > 0.0)) spec.fail(re->line, "radius must be positive");
    }
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            if (const Entry* e = spec.find(k)) spec.fail(e->line, "key '" + std::string(k) + "' does not apply to kind " + kind.value);
            if (auto it = spec.repeated.find(k); it != spec.repeated.end())
                spec.fail(it->second.front().line, "key '" + std::string(k) + "' does not apply to kind " + kind.value);
        }
    };
    if (kind.value == "polynomial") {
        forbid({"h", "hcoeffs", "lambda", "name"});
        return build_polynomial(spec, radius);
    }
    if (kind.value == "symmetric-h") {
        forbid({"term", "name"});
        return build_symmetric(spec, radius);
    }
    if (kind.value == "builtin") {
        forbid({"term", "h", "hcoeffs", "lambda"});
        const Entry& name = spec.require("name");
        const int d = tangential_dim(spec, spec.require("dim"));
        return anchored(spec, name.line, [&] { return Obstacle::builtin(name.value, d, radius); });
    }
    spec.fail(kind.line, "unknown obstacle kind '" + kind.value + "' (polynomial, symmetric-h, builtin)");
}

Obstacle load_obstacle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open obstacle file '" + path + "'");
    return parse_obstacle(in, path);
}

IncomingPhase parse_phase(std::istream& in, const std::string& source, int dim) {
    const SpecLines spec = read_lines(in, source, {"kind", "theta", "b", "center", "radius"}, {});
    const Entry& kind = spec.require("kind");
    auto vector_of_dim = [&](const char* key) {
        const Entry& e = spec.require(key);
        const auto v = numbers(spec, e);
        if (static_cast<int>(v.size()) != dim)
            spec.fail(e.line, std::string(key) + " needs " + std::to_string(dim) + " components to match the obstacle");
        return std::make_pair(to_vec(v), e.line);
    };
    auto only = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, e] : spec.single) {
            bool ok = k == "kind";
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) spec.fail(e.line, "key '" + k + "' does not apply to kind " + kind.value);
        }
    };
    if (kind.value == "plane") {
        only({"theta"});
        const auto [theta, line] = vector_of_dim("theta");
        return anchored(spec, line, [&] { return IncomingPhase::plane(theta); });
    }
    if (kind.value == "spherical") {
        only({"b"});
        const auto [b, line] = vector_of_dim("b");
        return anchored(spec, line, [&] { return IncomingPhase::spherical(b); });
    }
    if (kind.value == "convex-distance") {
        only({"center", "radius"});
        const auto [c, line] = vector_of_dim("center");
        const double r = one_number(spec, spec.require("radius"));
        return anchored(spec, line, [&] { return IncomingPhase::convex_distance(c, r); });
    }
    spec.fail(kind.line, "unknown phase kind '" + kind.value + "' (plane, spherical, convex-distance)");
}

IncomingPhase load_phase(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open phase file '" + path + "'");
    return parse_phase(in, path, dim);
}

}  // namespace graze::cli
