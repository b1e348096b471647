#include <iostream>
#include <string>
#include <vector>

#include "porosim/config.hpp"
#include "porosim/pipeline.hpp"

namespace {

void print_usage() {
    std::cout <<
        "porosim - membrane dimple simulator and free-boundary analyzer\n"
        "\n"
        "usage:\n"
        "  porosim simulate     --config <path> [--out <dir>] [--dry-run]\n"
        "  porosim analyze      --config <path> --trajectory <csv> [--out <dir>]\n"
        "  porosim validate     [--filter <name>]\n"
        "  porosim scale-report [--config <path>] [--json]\n"
        "  porosim sweep        --config <path> [--out <dir>]\n"
        "\n"
        "config is flat key=value with dotted prefixes (see README). Bundled\n"
        "scenarios: stationary-1d, radial-2d, traveling-wave-1d, flicker-1d,\n"
        "two-bump-collision-1d. Exit codes: 0 ok, 1 failure, 2 config error.\n"
        "POROSIM_THREADS caps sweep concurrency.\n";
}

struct Args {
    std::string command;
    std::string config_path;
    std::string out_dir = "out";
    std::string trajectory;
    std::string filter;
    bool dry_run = false;
    bool json = false;
};

bool parse_args(int argc, char** argv, Args& a) {
    if (argc < 2) return false;
    a.command = argv[1];
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> const char* {
            if (i + 1 >= argc) return nullptr;
            return argv[++i];
        };
        if (arg == "--config") {
            const char* v = next();
            if (!v) return false;
            a.config_path = v;
        } else if (arg == "--out") {
            const char* v = next();
            if (!v) return false;
            a.out_dir = v;
        } else if (arg == "--trajectory") {
            const char* v = next();
            if (!v) return false;
            a.trajectory = v;
        } else if (arg == "--filter") {
            const char* v = next();
            if (!v) return false;
            a.filter = v;
        } else if (arg == "--dry-run") {
            a.dry_run = true;
        } else if (arg == "--json") {
            a.json = true;
        } else {
            std::cerr << "error: unknown argument '" << arg << "'\n";
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace porosim;
    Args a;
    if (!parse_args(argc, argv, a)) {
        print_usage();
        return kExitConfig;
    }
    if (a.command == "help" || a.command == "--help" || a.command == "-h") {
        print_usage();
        return kExitOk;
    }

    try {
        if (a.command == "simulate" || a.command == "analyze" ||
            a.command == "sweep") {
            if (a.config_path.empty()) {
                std::cerr << "error: " << a.command << " needs --config\n";
                return kExitConfig;
            }
        }
        RunConfig cfg;
        if (!a.config_path.empty()) cfg = RunConfig::parse_file(a.config_path);

        if (a.command == "simulate") return cmd_simulate(cfg, a.out_dir, a.dry_run);
        if (a.command == "analyze") {
            if (a.trajectory.empty()) {
                std::cerr << "error: analyze needs --trajectory <csv>\n";
                return kExitConfig;
            }
            return cmd_analyze(a.trajectory, cfg, a.out_dir);
        }
        if (a.command == "validate") return cmd_validate(a.filter);
        if (a.command == "scale-report") return cmd_scale_report(cfg, a.json);
        if (a.command == "sweep") return cmd_sweep(cfg, a.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::cerr << "error: unknown command '" << a.command << "'\n";
    print_usage();
    return kExitConfig;
}
