// Acceptance suite: one pass/fail line per criterion, full-scale settings.
#include <cstdio>
#include <cstring>

#include "mnls/harness.hpp"

int main(int argc, char** argv) {
    bool fast = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--fast") == 0) fast = true;
    std::printf("acceptance suite (%s level)\n", fast ? "fast" : "full");
    auto results = mnls::verify_suite(fast, "acceptance_work");
    return mnls::print_verify_results(results);
}
