// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace pnc {

/// One measured normalised correlation value g_m with its standard deviation.
struct CorrelationMeasurement {
    unsigned order = 2;  // m in {2,3,4}
    double value = 0.0;
    double sigma = 0.0;
};

}  // namespace pnc
