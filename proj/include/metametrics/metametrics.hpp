// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Convenience header pulling in the whole library.

#ifndef METAMETRICS_METAMETRICS_HPP
#define METAMETRICS_METAMETRICS_HPP

#include "metametrics/error.hpp"
#include "metametrics/history.hpp"
#include "metametrics/ingest.hpp"
#include "metametrics/metrics.hpp"
#include "metametrics/report.hpp"
#include "metametrics/synth.hpp"

#endif  // METAMETRICS_METAMETRICS_HPP
