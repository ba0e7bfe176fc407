// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit status 0 iff all pass.

#include <cstdio>
#include <cstring>
#include <string>

#include "batchps/parallel.hpp"
#include "batchps/pipeline.hpp"

int main(int argc, char** argv) {
    std::string scratch = "acceptance_scratch";
    unsigned threads = batchps::default_threads();
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--scratch") == 0 && i + 1 < argc)
            scratch = argv[++i];
        else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
            threads = unsigned(std::atoi(argv[++i]));
    }

    auto results = batchps::run_acceptance(threads, scratch);
    bool all = true;
    double total = 0.0;
    for (const auto& c : results) {
        std::printf("criterion %02d [%s] %s: %s [%.1fs]\n", c.id,
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str(),
                    c.seconds);
        all = all && c.pass;
        total += c.seconds;
    }
    std::printf("%s (%zu criteria, %.1fs total)\n",
                all ? "ALL CRITERIA PASS" : "CRITERIA FAILED", results.size(),
                total);
    return all ? 0 : 1;
}
