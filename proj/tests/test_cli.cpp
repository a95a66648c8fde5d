#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "graze/cli.hpp"
#include "graze/error.hpp"
#include "support.hpp"

using namespace graze;
namespace fs = std::filesystem;

namespace {

const std::string kSpecs = GRAZE_SPECS_DIR;

std::string spec(const std::string& name) { return kSpecs + "/" + name; }

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("graze_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

// Message of the ParseError raised by parsing `text` as an obstacle file.
std::string obstacle_error(const std::string& text) {
    std::istringstream in(text);
    try {
        cli::parse_obstacle(in, "test.obstacle");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        return e.what();
    }
    FAIL("obstacle parsed without error: " << text);
    return {};
}

std::string phase_error(const std::string& text, int dim = 3) {
    std::istringstream in(text);
    try {
        cli::parse_phase(in, "test.phase", dim);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        return e.what();
    }
    FAIL("phase parsed without error: " << text);
    return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

struct Captured {
    int code;
    std::string out;
    std::string err;
};

Captured run_cli(const cli::RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = cli::run(cfg, out, err);
    return {code, out.str(), err.str()};
}

cli::RunConfig config(cli::Command cmd, const std::string& obstacle, const std::string& phase, const fs::path& dir) {
    cli::RunConfig c;
    c.command = cmd;
    c.obstacle_path = spec(obstacle);
    c.phase_path = spec(phase);
    c.out_dir = dir.string();
    return c;
}

int run_main(std::vector<std::string> args) {
    args.insert(args.begin(), "graze");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("obstacle files parse into the expected surfaces") {
    std::istringstream in(
        "# cusp\n"
        "kind = polynomial\n"
        "dim = 3\n"
        "term = 1 0 0   # constant\n"
        "term = -1 4 0\n"
        "\n"
        "term = -1 0 2\n");
    const Obstacle f = cli::parse_obstacle(in, "inline");
    REQUIRE(f.as_polynomial() != nullptr);
    CHECK(f.dim() == 3);
    const Vec x = testing::vec({-0.1, 0.06});
    CHECK(f.eval(x) == testing::cusp().eval(x));

    std::istringstream sym("kind = symmetric-h\ndim = 3\nhcoeffs = 0 1\nlambda = 1 0 0 2\nradius = 0.5\n");
    const Obstacle s = cli::parse_obstacle(sym, "inline");
    REQUIRE(s.as_symmetric() != nullptr);
    CHECK(s.radius() == 0.5);
    CHECK(s.eval(testing::vec({0.1, 0.1})) == doctest::Approx(1.0 - 0.05 * 0.05).epsilon(1e-15));

    const Obstacle flat = cli::load_obstacle(spec("exp_flat.obstacle"));
    REQUIRE(flat.as_symmetric() != nullptr);
    CHECK(flat.as_symmetric()->h().kind() == HProfile::Kind::ExpFlat);

    std::istringstream builtin("kind = builtin\nname = paraboloid\ndim = 3\n");
    CHECK(cli::parse_obstacle(builtin, "inline").dim() == 3);

    for (const char* name : {"sphere", "cusp", "cusp_mixed", "quartic", "quartic_mixed", "planar_cusp", "planar_c1"})
        CHECK(cli::load_obstacle(spec(std::string(name) + ".obstacle")).dim() == 3);
}

TEST_CASE("obstacle file diagnostics carry line numbers") {
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0\n"), "test.obstacle:3: term needs"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 0\nterm = -1 1 0\n"),
                   "test.obstacle:4: degree-one term"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 2 0 0\n"), "test.obstacle:3: constant term"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 0\nterm = -1 2 0\nterm = -2 2 0\n"),
                   "test.obstacle:5: repeats the monomial of line 4"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 0\nterm = -1 1.5 0\n"),
                   "test.obstacle:4: exponents must be nonnegative integers"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 1\nterm = 1\n"), "test.obstacle:2:"));
    CHECK(contains(obstacle_error("kind = polynomial\n\ndim = 3\ncolour = red\n"), "test.obstacle:4: unknown key"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\ndim = 3\n"), "test.obstacle:3: duplicate key"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 x\n"), "test.obstacle:3: not a number"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm\n"), "test.obstacle:3: expected 'key = value'"));
    CHECK(contains(obstacle_error("kind = torus\ndim = 3\n"), "test.obstacle:1: unknown obstacle kind"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\n"), "needs at least one 'term'"));
    CHECK(contains(obstacle_error("kind = symmetric-h\ndim = 3\nh = exp-flat\nhcoeffs = 0 1\n"), "test.obstacle:4:"));
    CHECK(contains(obstacle_error("kind = symmetric-h\ndim = 3\nhcoeffs = 0 1\nlambda = 1 0 0\n"),
                   "test.obstacle:4: lambda must list a square matrix"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 0\nhcoeffs = 1\n"),
                   "test.obstacle:4: key 'hcoeffs' does not apply"));
    CHECK(contains(obstacle_error("kind = polynomial\ndim = 3\nterm = 1 0 0\nradius = -1\n"),
                   "test.obstacle:4: radius must be positive"));

    try {
        cli::load_obstacle("/nonexistent/file.obstacle");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("phase files parse and check their dimension") {
    const IncomingPhase a = cli::load_phase(spec("source_apex.phase"), 3);
    REQUIRE(a.as_spherical() != nullptr);
    CHECK((a.as_spherical()->b - testing::vec({1, -1, 0})).norm() == 0.0);
    CHECK(cli::load_phase(spec("plane_x2.phase"), 3).as_plane() != nullptr);
    CHECK(cli::load_phase(spec("distance_sphere.phase"), 3).dim() == 3);

    CHECK(contains(phase_error("kind = spherical\nb = 1 -1\n"), "test.phase:2: b needs 3 components"));
    CHECK(contains(phase_error("kind = plane\ntheta = 0 1 0\nb = 1 0 0\n"), "test.phase:3: key 'b' does not apply"));
    CHECK(contains(phase_error("kind = wobble\n"), "test.phase:1: unknown phase kind"));
    CHECK(contains(phase_error("kind = plane\n"), "missing required key 'theta'"));

    // Errors raised by the phase constructors keep their code and gain the line.
    std::istringstream skew("kind = plane\ntheta = 0 1 1\n");
    try {
        cli::parse_phase(skew, "test.phase", 3);
        FAIL("expected a non-unit theta to be rejected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
        CHECK(contains(e.what(), "test.phase:2: theta must be a unit vector"));
    }
}

TEST_CASE("number formatting round-trips") {
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(-2.0) == "-2");
    CHECK(cli::format_number(1e-5) == "1e-05");
    testing::Rng rng(307);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-1, 1) * std::pow(10.0, rng.integer(-12, 12));
        CHECK(std::stod(cli::format_number(x)) == x);
    }
}

TEST_CASE("classify reports order and verdict") {
    const fs::path dir = scratch("classify");
    const Captured cusp = run_cli(config(cli::Command::Classify, "cusp.obstacle", "source_apex.phase", dir));
    CHECK(cusp.code == cli::exit_code::kPass);
    CHECK(contains(cusp.out, "order = 4 diffractive"));
    CHECK(contains(cusp.out, "verdict = GS-FAILS-CUSP-EVIDENCE"));
    CHECK(contains(cusp.out, "slice -0.05 = (1,1)"));
    CHECK(slurp(dir / "classify.txt") == cusp.out);

    const Captured sphere = run_cli(config(cli::Command::Classify, "sphere.obstacle", "source_apex.phase", dir));
    CHECK(sphere.code == cli::exit_code::kPass);
    CHECK(contains(sphere.out, "order = 2 diffractive"));
    CHECK(contains(sphere.out, "verdict = GS-HOLDS-SMOOTH"));

    const Captured quartic = run_cli(config(cli::Command::Classify, "quartic.obstacle", "source_apex.phase", dir));
    CHECK(contains(quartic.out, "verdict = GS-HOLDS-C1-EVIDENCE"));
    CHECK(contains(quartic.out, "u1ww = FAIL"));
}

TEST_CASE("trace writes a deterministic CSV") {
    const fs::path d1 = scratch("trace1");
    const fs::path d2 = scratch("trace2");
    const Captured a = run_cli(config(cli::Command::Trace, "cusp.obstacle", "source_apex.phase", d1));
    const Captured b = run_cli(config(cli::Command::Trace, "cusp.obstacle", "source_apex.phase", d2));
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    const std::string csv = slurp(d1 / "trace.csv");
    CHECK(csv == slurp(d2 / "trace.csv"));
    const auto rows = lines_of(csv);
    REQUIRE(rows.size() > 100);
    CHECK(rows[0] == "branch,arc,x2,x3,residual");
    for (size_t i = 1; i < rows.size(); ++i) {
        std::istringstream row(rows[i]);
        std::string field;
        std::vector<double> v;
        while (std::getline(row, field, ',')) v.push_back(std::stod(field));
        REQUIRE(v.size() == 5);
        CHECK((v[0] == 0.0 || v[0] == 1.0));
        CHECK(std::abs(v[4]) <= 1e-10);
    }
    CHECK_FALSE(fs::exists(d1 / "trace.svg"));
}

TEST_CASE("a zero window gives a header-only CSV") {
    const fs::path dir = scratch("window0");
    cli::RunConfig c = config(cli::Command::Trace, "cusp.obstacle", "source_apex.phase", dir);
    c.window = 0.0;
    CHECK(run_cli(c).code == 0);
    CHECK(slurp(dir / "trace.csv") == "branch,arc,x2,x3,residual\n");
}

TEST_CASE("render writes an SVG with the traced branches") {
    const fs::path dir = scratch("render");
    const Captured r = run_cli(config(cli::Command::Render, "cusp.obstacle", "source_apex.phase", dir));
    CHECK(r.code == 0);
    const std::string svg = slurp(dir / "render.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "<polyline"));
    CHECK(contains(svg, "</svg>"));
    CHECK(contains(svg, "x2"));
    CHECK(contains(svg, "x3"));

    cli::RunConfig both = config(cli::Command::Trace, "quartic.obstacle", "source_apex.phase", dir);
    both.format = cli::Format::Both;
    CHECK(run_cli(both).code == 0);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "trace.svg"));
}

TEST_CASE("rfm-check verdict line and budget validation") {
    const fs::path dir = scratch("rfm");
    cli::RunConfig c = config(cli::Command::RfmCheck, "sphere.obstacle", "source_apex.phase", dir);
    c.budget = 500;
    const Captured ok = run_cli(c);
    CHECK(ok.code == cli::exit_code::kPass);
    const auto out = lines_of(ok.out);
    REQUIRE_FALSE(out.empty());
    CHECK(out.back() == "RFM PASS");
    const auto rows = lines_of(slurp(dir / "rfm.csv"));
    REQUIRE(rows.size() == 501);
    CHECK(rows[0] == "s,x2,x3,t,mu,j_analytic,j_fd,bound,pass");

    c.budget = 0;
    const Captured bad = run_cli(c);
    CHECK(bad.code == cli::exit_code::kUsage);
    CHECK(contains(bad.err, "InvalidBudget"));
}

TEST_CASE("reflect tabulates the grid") {
    const fs::path dir = scratch("reflect");
    const Captured r = run_cli(config(cli::Command::Reflect, "sphere.obstacle", "source_apex.phase", dir));
    CHECK(r.code == 0);
    const auto rows = lines_of(slurp(dir / "reflect.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0].rfind("x2,x3,mu,label", 0) == 0);
}

TEST_CASE("errors map to exit codes") {
    const fs::path dir = scratch("errors");
    const fs::path bad = dir / "bad.obstacle";
    std::ofstream(bad) << "kind = polynomial\ndim = 3\nterm = 1 0 0\nterm = -1 1 0\n";
    cli::RunConfig c = config(cli::Command::Classify, "cusp.obstacle", "source_apex.phase", dir);
    c.obstacle_path = bad.string();
    const Captured r = run_cli(c);
    CHECK(r.code == cli::exit_code::kUsage);
    CHECK(contains(r.err, bad.string() + ":4:"));

    cli::RunConfig neg = config(cli::Command::Trace, "cusp.obstacle", "source_apex.phase", dir);
    neg.tol = -1.0;
    CHECK(run_cli(neg).code == cli::exit_code::kUsage);

    // The window does not fit in the declared domain.
    cli::RunConfig wide = config(cli::Command::Trace, "cusp.obstacle", "source_apex.phase", dir);
    wide.window = 5.0;
    CHECK(run_cli(wide).code != cli::exit_code::kPass);

    cli::RunConfig relocated = config(cli::Command::Classify, "cusp.obstacle", "source_relocated.phase", dir);
    const Captured rel = run_cli(relocated);
    CHECK(rel.code == cli::exit_code::kPass);
    CHECK(contains(rel.out, "order = 2 diffractive"));
}

TEST_CASE("command-line parsing") {
    const fs::path dir = scratch("argv");
    CHECK(run_main({"--help"}) == 0);
    CHECK(run_main({}) == cli::exit_code::kUsage);
    CHECK(run_main({"trace", "--obstacle", spec("cusp.obstacle")}) == cli::exit_code::kUsage);
    CHECK(run_main({"trace", "--obstacle", spec("cusp.obstacle"), "--phase", spec("source_apex.phase"), "--bogus"}) ==
          cli::exit_code::kUsage);
    CHECK(run_main({"rfm-check", "--obstacle", spec("sphere.obstacle"), "--phase", spec("source_apex.phase"), "--out",
                    dir.string(), "--budget", "0"}) == cli::exit_code::kUsage);
    CHECK(run_main({"trace", "--obstacle", spec("cusp.obstacle"), "--phase", spec("source_apex.phase"), "--out",
                    dir.string(), "--window", "0.05"}) == 0);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("the installed binary produces byte-identical traces") {
    const char* exe = std::getenv("GRAZE_CLI");
    if (!exe) {
        MESSAGE("GRAZE_CLI not set; skipping the subprocess check");
        return;
    }
    const fs::path d1 = scratch("proc1");
    const fs::path d2 = scratch("proc2");
    for (const fs::path& d : {d1, d2}) {
        const std::string cmd = std::string("\"") + exe + "\" trace --obstacle \"" + spec("cusp_mixed.obstacle") +
                                "\" --phase \"" + spec("source_apex.phase") + "\" --out \"" + d.string() +
                                "\" > /dev/null";
        CHECK(std::system(cmd.c_str()) == 0);
    }
    CHECK(slurp(d1 / "trace.csv") == slurp(d2 / "trace.csv"));
    CHECK_FALSE(slurp(d1 / "trace.csv").empty());
}
