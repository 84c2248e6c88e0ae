// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs every acceptance criterion at full scale and prints one line each.
// Exit status is nonzero when a gating criterion fails.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "discovery/discovery.h"

namespace {

void report(const dsc_criterion* c, void*)
{
    std::printf("%s criterion %d%s: %s (%.1fs) %s\n", c->passed ? "PASS" : "FAIL", c->id,
                c->gating ? "" : " [supplementary]", c->title, c->seconds, c->detail);
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv)
{
    dsc_verify_options opt;
    dsc_verify_options_init(&opt);
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) {
        const char* next = i + 1 < argc ? argv[i + 1] : nullptr;
        if (!std::strcmp(argv[i], "--cache-dir") && next)
            opt.cache_dir = argv[++i];
        else if (!std::strcmp(argv[i], "--output") && next)
            opt.output = argv[++i];
        else if (!std::strcmp(argv[i], "--only") && next)
            only.push_back(std::atoi(argv[++i]));
        else {
            std::fprintf(stderr, "usage: %s [--cache-dir DIR] [--output CSV] [--only ID]...\n", argv[0]);
            return 1;
        }
    }
    opt.only = only.empty() ? nullptr : only.data();
    opt.only_count = only.size();

    int failed = 0;
    if (dsc_verify(&opt, report, nullptr, &failed) != DSC_OK) {
        std::fprintf(stderr, "acceptance run aborted: %s\n", dsc_last_error());
        return 2;
    }
    std::printf("%d gating criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
