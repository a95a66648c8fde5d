#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graze/grazing.hpp"
#include "graze/obstacle.hpp"
#include "graze/phase.hpp"
#include "graze/reflection.hpp"

namespace graze::cli {

// ---- spec files
//
// Both file kinds are sequences of `key = value` lines. Blank lines and text
// after '#' are ignored. Diagnostics carry `source:line:` prefixes.

Obstacle parse_obstacle(std::istream& in, const std::string& source);
Obstacle load_obstacle(const std::string& path);

// `dim` is the ambient dimension n of the obstacle the phase will be paired with.
IncomingPhase parse_phase(std::istream& in, const std::string& source, int dim);
IncomingPhase load_phase(const std::string& path, int dim);

// ---- output

// Shortest decimal form that parses back to the same double; locale independent.
std::string format_number(double x);

void write_trace_csv(std::ostream& out, const GrazingCurve& curve);
void write_rfm_csv(std::ostream& out, const RfmVerdict& verdict, int tangential_dim);

struct SvgOptions {
    int width = 640;
    int height = 640;
    std::string title;
};

// Projection of the traced branches onto the (x2, x3) plane, framed by the
// trace window. The optional sheet is drawn by projecting each flowout line.
void write_trace_svg(std::ostream& out, const GrazingCurve& curve, const FlowoutSheet* sheet,
                     const SvgOptions& options = {});

// One `key = value` line per item; keys with no value for this report are omitted.
void write_report(std::ostream& out, const GsReport& report);

// ---- commands

enum class Command { Classify, Trace, RfmCheck, Reflect, Render };
enum class Format { Csv, Svg, Both };

std::string to_string(Command command);

struct RunConfig {
    Command command = Command::Classify;
    std::string obstacle_path;
    std::string phase_path;
    std::string out_dir = "out";
    std::optional<double> s0;
    std::optional<int> budget;
    std::optional<double> window;
    std::optional<double> tol;
    unsigned long long seed = 42;
    std::optional<Format> format;

    // Throws InvalidArgument when a required path is empty or a numeric option
    // is out of range.
    void validate() const;
};

namespace exit_code {
inline constexpr int kPass = 0;
inline constexpr int kUsage = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kNumericalFailure = 3;
}  // namespace exit_code

// Runs one subcommand. Library errors are reported on `err` and mapped to
// exit codes; nothing is thrown.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace graze::cli
