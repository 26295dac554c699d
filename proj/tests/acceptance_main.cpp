// acceptance_main.cpp - runs every acceptance criterion, printing one
// pass/fail line each; exit status 0 only when all pass.
#include <cstdlib>
#include <cstring>
#include <iostream>

#include "errw/acceptance.hpp"

int main(int argc, char** argv) {
    errw::acceptance::Options opt;
    opt.fixture_dir = "acceptance_fixtures";
    for (int i = 1; i + 1 < argc; ++i) {
        if (!std::strcmp(argv[i], "--seed")) opt.seed = std::strtoull(argv[i + 1], nullptr, 10);
        if (!std::strcmp(argv[i], "--fixtures")) opt.fixture_dir = argv[i + 1];
    }
    const auto results = errw::acceptance::run_all(opt, &std::cout);
    int passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return errw::acceptance::all_pass(results) ? 0 : 1;
}
