// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal end-to-end tour: build a history in code, compute metrics at two
// gates, evaluate a small gate policy, and print the markdown report.

#include <iostream>

#include "metametrics/metametrics.hpp"

namespace mm = metametrics;

int main() {
    const mm::ArtifactId id{"demo-unit"};
    std::vector<mm::RevisionRecord> records;
    for (mm::Revision i = 1; i <= 12; ++i) {
        mm::IndicatorSample ind;
        ind.sloc = 1000 + 10 * static_cast<std::int64_t>(i);
        ind.mccabe = 18;
        const bool pass = i % 3 != 0;  // fails at 3, 6, 9, 12
        if (pass) {
            ind.duration_s = 2.0 + 0.05 * static_cast<double>(i);
            ind.acting_s["cutin"] = 1.2;
        }
        records.push_back(mm::RevisionRecord{
            id, i, pass ? mm::TestOutcome::Pass : mm::TestOutcome::Fail, std::move(ind)});
    }

    mm::HistorySet set;
    set.insert(mm::ArtifactHistory::from_records(id, std::move(records)));

    mm::GatePolicy policy;
    policy.gates = {{"mid", 6}, {"final", 12}};
    policy.rules = {
        mm::Rule{mm::MetricSelector::parse("q1", true), mm::Comparator::Ge, -0.25,
                 mm::Severity::Fail},
        mm::Rule{mm::MetricSelector::parse("q4:mccabe", true), mm::Comparator::Ge, 0.0,
                 mm::Severity::Warn},
    };

    const mm::PolicyRun run = mm::run_gate_policy(set, policy);
    std::cout << mm::render_report_markdown(run.reports, run.verdicts);
    std::cout << "\noverall gate outcome: " << (run.any_fail() ? "fail" : "pass") << "\n";
    return run.any_fail() ? 1 : 0;
}
