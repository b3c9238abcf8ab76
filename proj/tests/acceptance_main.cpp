// Acceptance suite runner: one pass/fail line per criterion on stdout,
// nonzero exit if any criterion fails. `dyntrack verify` runs the same
// checks through the CLI.
#include <cstring>
#include <iostream>
#include <string>

#include "dyntrack/acceptance.hpp"

int main(int argc, char** argv) {
    dyntrack::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            options.only.push_back(std::atoi(argv[++i]));
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            options.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            options.threads = static_cast<std::uint32_t>(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: acceptance [--criterion N]... [--seed N] [--threads N]\n";
            return 2;
        }
    }
    const auto results = dyntrack::run_acceptance(options, std::cout);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (failed == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failed) + " criterion(s) failed")
              << "\n";
    return failed == 0 ? 0 : 1;
}
