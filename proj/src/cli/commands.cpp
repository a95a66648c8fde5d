#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "graze/cli.hpp"
#include "graze/error.hpp"

namespace graze::cli {

std::string to_string(Command command) {
    switch (command) {
        case Command::Classify: return "classify";
        case Command::Trace: return "trace";
        case Command::RfmCheck: return "rfm-check";
        case Command::Reflect: return "reflect";
        case Command::Render: return "render";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (obstacle_path.empty()) throw Error(ErrorCode::InvalidArgument, "--obstacle is required");
    if (phase_path.empty()) throw Error(ErrorCode::InvalidArgument, "--phase is required");
    if (out_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--out must not be empty");
    if (tol && !(*tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
    if (s0 && !(*s0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "--s0 must be positive");
    if (window && !(*window >= 0.0)) throw Error(ErrorCode::InvalidArgument, "--window must be nonnegative");
}

namespace {

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoConvergence:
        case ErrorCode::SeedNotFound:
        case ErrorCode::StepCollapse:
        case ErrorCode::InsufficientPoints:
        case ErrorCode::SliceMiss:
        case ErrorCode::GrazingSingular:
        case ErrorCode::OutsideRange:
        case ErrorCode::StepInvalid:
        case ErrorCode::NotGrazing:
        case ErrorCode::ShadowPoint:
            return exit_code::kNumericalFailure;
        default:
            return exit_code::kUsage;
    }
}

std::filesystem::path prepare_out(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    return std::filesystem::path(cfg.out_dir);
}

// Writes through a string buffer so a failed run never leaves a half file.
void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

int classify(const RunConfig& cfg, const Obstacle& obstacle, const IncomingPhase& phase, std::ostream& out) {
    GsOptions opt;
    if (cfg.window) opt.window = *cfg.window;
    if (cfg.tol) opt.trace_tol = *cfg.tol;
    const GsReport rep = gs_assumption_report(obstacle, phase, opt);

    std::ostringstream text;
    text << "obstacle = " << cfg.obstacle_path << '\n';
    text << "phase = " << phase.describe() << '\n';
    text << "window = " << format_number(opt.window) << '\n';
    write_report(text, rep);
    write_file(prepare_out(cfg) / "classify.txt", text.str());
    out << text.str();
    return rep.verdict == GsVerdict::Inconclusive ? exit_code::kInconclusive : exit_code::kPass;
}

int trace_or_render(const RunConfig& cfg, const Obstacle& obstacle, const IncomingPhase& phase, std::ostream& out) {
    const bool render = cfg.command == Command::Render;
    const Format fmt = cfg.format.value_or(render ? Format::Svg : Format::Csv);
    const double window = cfg.window.value_or(0.1);
    const GrazingFunction gf = GrazingFunction::for_phase(phase, obstacle);
    const GrazingCurve curve = trace_grazing_curve(gf, obstacle, window, cfg.tol.value_or(1e-10));
    const auto dir = prepare_out(cfg);
    const std::string stem = render ? "render" : "trace";

    size_t vertices = 0;
    for (const auto& b : curve.branches) vertices += b.vertices.size();
    out << "grazing_function = " << gf.describe() << '\n';
    out << "branches = " << curve.branches.size() << '\n';
    out << "vertices = " << vertices << '\n';

    if (fmt == Format::Csv || fmt == Format::Both) {
        std::ostringstream csv;
        write_trace_csv(csv, curve);
        write_file(dir / (stem + ".csv"), csv.str());
        out << "csv = " << (dir / (stem + ".csv")).string() << '\n';
    }
    if (fmt == Format::Svg || fmt == Format::Both) {
        std::optional<FlowoutSheet> sheet;
        if (render) {
            // Incoming rays through every few grazing points, drawn up to the apex scale.
            const double s_max = cfg.s0.value_or(0.5 * window);
            std::vector<double> s_values;
            for (int k = 0; k <= 10; ++k) s_values.push_back(s_max * k / 10.0);
            GrazingCurve sparse = curve;
            for (auto& br : sparse.branches) {
                std::vector<CurveVertex> keep;
                for (size_t i = 0; i < br.vertices.size(); i += 8) keep.push_back(br.vertices[i]);
                br.vertices = std::move(keep);
            }
            sheet = shadow_boundary_flowout(obstacle, phase, sparse, s_values, 0.0, 1e-8);
        }
        SvgOptions so;
        so.title = gf.describe();
        std::ostringstream svg;
        write_trace_svg(svg, curve, sheet ? &*sheet : nullptr, so);
        write_file(dir / (stem + ".svg"), svg.str());
        out << "svg = " << (dir / (stem + ".svg")).string() << '\n';
    }
    return exit_code::kPass;
}

int rfm_check(const RunConfig& cfg, const Obstacle& obstacle, const IncomingPhase& phase, std::ostream& out) {
    RfmOptions opt;
    if (cfg.s0) opt.s0 = *cfg.s0;
    if (cfg.budget) opt.budget = *cfg.budget;
    if (cfg.window) opt.radius = *cfg.window;
    if (cfg.tol) opt.tol = *cfg.tol;
    opt.seed = cfg.seed;
    const RfmVerdict v = verify_rfm(obstacle, phase, opt);

    std::ostringstream csv;
    write_rfm_csv(csv, v, obstacle.tangential_dim());
    const auto path = prepare_out(cfg) / "rfm.csv";
    write_file(path, csv.str());

    out << "csv = " << path.string() << '\n';
    out << "samples = " << v.rows.size() << '\n';
    out << "illuminated = " << v.illuminated << '\n';
    out << "grazing = " << v.grazing << '\n';
    out << "bound_failures = " << v.bound_failures << '\n';
    out << "agreement_failures = " << v.agreement_failures << '\n';
    out << "collisions = " << v.collisions << '\n';
    out << "separation_failures = " << v.separation_failures << '\n';
    out << "min_separation_ratio = " << format_number(v.min_separation_ratio) << '\n';
    out << "worst_relative_error = " << format_number(v.worst_relative_error) << '\n';
    out << "min_j_minus_bound = " << format_number(v.min_j_minus_bound) << '\n';
    for (const auto& f : v.failures) out << "failure = " << f << '\n';
    out << (v.pass ? "RFM PASS" : "RFM FAIL") << '\n';
    return v.pass ? exit_code::kPass : exit_code::kNumericalFailure;
}

// Reflection data on a tangential grid: margin, label, reflected covector and
// the flow Jacobian at s0.
int reflect(const RunConfig& cfg, const Obstacle& obstacle, const IncomingPhase& phase, std::ostream& out) {
    const int d = obstacle.tangential_dim();
    if (d > 3) throw Error(ErrorCode::InvalidArgument, "reflect grids support at most three tangential variables");
    const double w = cfg.window.value_or(0.5);
    const double s = cfg.s0.value_or(1.0);
    const double tol = cfg.tol.value_or(kGrazingTol);
    const int per_axis = d == 1 ? 201 : d == 2 ? 41 : 11;

    std::ostringstream csv;
    for (int i = 0; i < d; ++i) csv << 'x' << i + 2 << ',';
    csv << "mu,label,xi1_r";
    for (int i = 0; i < d; ++i) csv << ",xir" << i + 2;
    csv << ",j_analytic\n";

    int total = 1;
    for (int i = 0; i < d; ++i) total *= per_axis;
    int counts[3] = {0, 0, 0};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int idx = 0; idx < total; ++idx) {
        Vec x(d);
        int rem = idx;
        for (int i = 0; i < d; ++i) {
            const int k = rem % per_axis;
            rem /= per_axis;
            x(i) = per_axis == 1 ? 0.0 : -w + 2.0 * w * k / (per_axis - 1);
        }
        if (!obstacle.contains(x)) continue;
        const BoundaryClassification c = classify_boundary_point(obstacle, phase, x, tol);
        ++counts[static_cast<int>(c.label)];
        BoundaryCovector xr;
        bool have_r = c.label != PointLabel::Shadow;
        if (have_r) xr = reflect_direction(obstacle, x, xi_incoming(phase, obstacle, x));
        double j = nan;
        if (c.label == PointLabel::Illuminated) j = jacobian_analytic(obstacle, phase, s, x, tol).j_analytic;
        for (int i = 0; i < d; ++i) csv << format_number(x(i)) << ',';
        csv << format_number(c.margin) << ',' << to_string(c.label) << ',' << format_number(have_r ? xr.xi1 : nan);
        for (int i = 0; i < d; ++i) csv << ',' << format_number(have_r ? xr.xibar(i) : nan);
        csv << ',' << format_number(j) << '\n';
    }
    const auto path = prepare_out(cfg) / "reflect.csv";
    write_file(path, csv.str());
    out << "csv = " << path.string() << '\n';
    out << "illuminated = " << counts[static_cast<int>(PointLabel::Illuminated)] << '\n';
    out << "grazing = " << counts[static_cast<int>(PointLabel::Grazing)] << '\n';
    out << "shadow = " << counts[static_cast<int>(PointLabel::Shadow)] << '\n';
    return exit_code::kPass;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        const Obstacle obstacle = load_obstacle(cfg.obstacle_path);
        const IncomingPhase phase = load_phase(cfg.phase_path, obstacle.dim());
        switch (cfg.command) {
            case Command::Classify: return classify(cfg, obstacle, phase, out);
            case Command::Trace:
            case Command::Render: return trace_or_render(cfg, obstacle, phase, out);
            case Command::RfmCheck: return rfm_check(cfg, obstacle, phase, out);
            case Command::Reflect: return reflect(cfg, obstacle, phase, out);
        }
        return exit_code::kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }
}

namespace {

struct FlagSet {
    bool s0 = false, budget = false, window = false, tol = false, seed = false, format = false;
};

CLI::App* add_command(CLI::App& app, RunConfig& cfg, Command cmd, const std::string& help, const FlagSet& flags,
                      Command& chosen, const std::string& window_help) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    sub->add_option("--obstacle", cfg.obstacle_path, "obstacle spec file")->required();
    sub->add_option("--phase", cfg.phase_path, "incoming phase spec file")->required();
    sub->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    if (flags.s0) sub->add_option("--s0", cfg.s0, "ray parameter bound s0")->check(CLI::PositiveNumber);
    if (flags.budget) sub->add_option("--budget", cfg.budget, "number of random samples (default 1000)");
    if (flags.window) sub->add_option("--window", cfg.window, window_help)->check(CLI::NonNegativeNumber);
    if (flags.tol) sub->add_option("--tol", cfg.tol, "tolerance override (positive)")->check(CLI::PositiveNumber);
    if (flags.seed) sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    if (flags.format) {
        sub->add_option_function<std::string>(
               "--format",
               [&cfg](const std::string& name) {
                   cfg.format = name == "csv" ? Format::Csv : name == "svg" ? Format::Svg : Format::Both;
               },
               "output format: csv, svg or both")
            ->check(CLI::IsMember({"csv", "svg", "both"}, CLI::ignore_case));
    }
    sub->callback([&chosen, cmd] { chosen = cmd; });
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grazing-set and reflected-flow analysis for convex obstacles"};
    app.require_subcommand(1);
    RunConfig cfg;
    Command chosen = Command::Classify;

    add_command(app, cfg, Command::Classify, "order, hypothesis checks and regularity verdict",
                {.window = true, .tol = true}, chosen, "trace window half-width (default 0.1)");
    add_command(app, cfg, Command::Trace, "trace the grazing curve near the apex",
                {.window = true, .tol = true, .format = true}, chosen, "trace window half-width (default 0.1)");
    add_command(app, cfg, Command::Render, "render the grazing curve and shadow-boundary rays",
                {.s0 = true, .window = true, .tol = true, .format = true}, chosen,
                "trace window half-width (default 0.1)");
    add_command(app, cfg, Command::RfmCheck, "sample the reflected flow map and check its Jacobian",
                {.s0 = true, .budget = true, .window = true, .tol = true, .seed = true}, chosen,
                "sampling radius around the apex (default 0.5)");
    add_command(app, cfg, Command::Reflect, "tabulate reflection data on a tangential grid",
                {.s0 = true, .window = true, .tol = true}, chosen, "grid half-width (default 0.5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::kPass : exit_code::kUsage;
    }
    cfg.command = chosen;
    return run(cfg, std::cout, std::cerr);
}

}  // namespace graze::cli
