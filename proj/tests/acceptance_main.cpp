// One PASS/FAIL line per acceptance criterion on the reference configuration.

#include <iostream>

#include "acceptance.hpp"
#include "config.hpp"

int main() {
    try {
        const auto cfg = gapeq::cli::load_config(GAPEQ_CONFIG_DIR "/default.cfg");
        const auto report = gapeq::cli::run_acceptance(cfg, &std::cout);
        return report.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance run failed: " << e.what() << "\n";
        return 1;
    }
}
