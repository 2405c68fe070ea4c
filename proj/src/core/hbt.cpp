// SPDX-License-Identifier: Apache-2.0
#include "hbt.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "error.hpp"

namespace pnc {

namespace {

// splitmix64; used both as the generator and to derive batch seeds, so the
// stream does not depend on the standard library's distribution internals.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

constexpr std::uint64_t kBatchSize = 1u << 16;

}  // namespace

void DetectorConfig::validate() const {
    if (!(efficiency > 0.0) || efficiency > eta0_cap) {
        fail(ErrorCode::validation,
             "detector efficiency must lie in (0, eta0_cap]");
    }
    if (!(eta0_cap > 0.0) || eta0_cap > 1.0) {
        fail(ErrorCode::validation, "eta0_cap must lie in (0, 1]");
    }
    double sum = 0.0;
    for (double p : split_probs) {
        if (!(p >= 0.0)) fail(ErrorCode::validation, "split probabilities must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        fail(ErrorCode::validation, "split probabilities must sum to 1 within 1e-12");
    }
    if (dark_count_prob < 0.0 || dark_count_prob > 1.0) {
        fail(ErrorCode::validation, "dark count probability must lie in [0, 1]");
    }
}

std::uint64_t CoincidenceCounts::singles(int i) const {
    std::uint64_t c = 0;
    for (int p = 0; p < 16; ++p) {
        if (p & (1 << i)) c += pattern[p];
    }
    return c;
}

std::uint64_t CoincidenceCounts::pairs(int i, int j) const {
    std::uint64_t c = 0;
    int mask = (1 << i) | (1 << j);
    for (int p = 0; p < 16; ++p) {
        if ((p & mask) == mask) c += pattern[p];
    }
    return c;
}

std::uint64_t CoincidenceCounts::triples(int i, int j, int k) const {
    std::uint64_t c = 0;
    int mask = (1 << i) | (1 << j) | (1 << k);
    for (int p = 0; p < 16; ++p) {
        if ((p & mask) == mask) c += pattern[p];
    }
    return c;
}

std::uint64_t CoincidenceCounts::quads() const { return pattern[15]; }

void CoincidenceCounts::add(const DetectionRecord& rec) {
    int mask = 0;
    for (int i = 0; i < kNumDetectors; ++i) {
        if (rec.clicks[i]) mask |= 1 << i;
    }
    ++pattern[mask];
    ++n_pulses;
}

void CoincidenceCounts::merge(const CoincidenceCounts& other) {
    n_pulses += other.n_pulses;
    for (int p = 0; p < 16; ++p) pattern[p] += other.pattern[p];
}

void CoincidenceCounts::check_invariants() const {
    std::uint64_t total = 0;
    for (auto c : pattern) total += c;
    if (total != n_pulses) {
        fail(ErrorCode::validation, "coincidence counts do not sum to n_pulses");
    }
    for (int i = 0; i < kNumDetectors; ++i) {
        for (int j = i + 1; j < kNumDetectors; ++j) {
            if (pairs(i, j) > std::min(singles(i), singles(j))) {
                fail(ErrorCode::validation, "pair count exceeds a single count");
            }
        }
    }
}

void simulate_pulse_train(const SourceKind& source, std::uint64_t n_pulses,
                          const DetectorConfig& cfg, std::uint64_t seed,
                          const RecordSink& sink) {
    cfg.validate();
    if (n_pulses == 0) fail(ErrorCode::validation, "n_pulses must be >= 1");

    PhotonNumberDistribution dist = source.realise();
    std::vector<double> cdf(dist.probs().size());
    double acc = 0.0;
    for (std::size_t n = 0; n < cdf.size(); ++n) {
        acc += dist[n];
        cdf[n] = acc;
    }
    std::array<double, 4> split_cdf{};
    acc = 0.0;
    for (int i = 0; i < kNumDetectors; ++i) {
        acc += cfg.split_probs[i];
        split_cdf[i] = acc;
    }
    split_cdf[3] = 1.0;

    SplitMix64 seeder(seed);
    std::uint64_t pulse = 0;
    while (pulse < n_pulses) {
        SplitMix64 rng(seeder.next());
        std::uint64_t batch_end = std::min(pulse + kBatchSize, n_pulses);
        for (; pulse < batch_end; ++pulse) {
            DetectionRecord rec;
            rec.pulse_index = pulse;
            double u = rng.uniform();
            std::size_t n = 0;
            while (n + 1 < cdf.size() && u >= cdf[n]) ++n;
            for (std::size_t ph = 0; ph < n; ++ph) {
                double v = rng.uniform();
                int det = 0;
                while (det < 3 && v >= split_cdf[det]) ++det;
                if (rng.uniform() < cfg.efficiency) rec.clicks[det] = true;
            }
            if (cfg.dark_count_prob > 0.0) {
                for (int i = 0; i < kNumDetectors; ++i) {
                    if (rng.uniform() < cfg.dark_count_prob) rec.clicks[i] = true;
                }
            }
            sink(rec);
        }
    }
}

CoincidenceCounts simulate_counts(const SourceKind& source,
                                  std::uint64_t n_pulses,
                                  const DetectorConfig& cfg,
                                  std::uint64_t seed) {
    CoincidenceCounts counts;
    simulate_pulse_train(source, n_pulses, cfg, seed,
                         [&](const DetectionRecord& rec) { counts.add(rec); });
    return counts;
}

CoincidenceCounts count_coincidences(const std::vector<DetectionRecord>& records) {
    if (records.empty()) fail(ErrorCode::empty_stream, "no detection records");
    CoincidenceCounts counts;
    for (const auto& rec : records) counts.add(rec);
    return counts;
}

CorrelationMeasurement estimate_correlation(const CoincidenceCounts& counts,
                                            unsigned order) {
    if (counts.n_pulses == 0) fail(ErrorCode::empty_stream, "no pulses counted");
    if (order < 2 || order > 4) {
        fail(ErrorCode::validation, "correlation order must be 2, 3 or 4");
    }
    const double n = static_cast<double>(counts.n_pulses);
    std::array<double, 4> s{};
    for (int i = 0; i < kNumDetectors; ++i) {
        auto si = counts.singles(i);
        if (si == 0) {
            fail(ErrorCode::insufficient_counts,
                 "a detector registered no clicks; g estimators undefined");
        }
        s[i] = static_cast<double>(si);
    }

    auto combine = [](const std::vector<double>& values,
                      const std::vector<double>& sigmas, unsigned order) {
        CorrelationMeasurement m;
        m.order = order;
        double var = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            m.value += values[i];
            var += sigmas[i] * sigmas[i];
        }
        double k = static_cast<double>(values.size());
        m.value /= k;
        m.sigma = std::sqrt(var) / k;
        return m;
    };

    auto require = [](std::uint64_t c, const char* what) {
        if (c == 0) {
            fail(ErrorCode::insufficient_counts,
                 std::string(what) + " coincidence count is zero; sigma undefined");
        }
        return static_cast<double>(c);
    };

    if (order == 2) {
        std::vector<double> v2, e2;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                double c = require(counts.pairs(i, j), "two-fold");
                double g = c * n / (s[i] * s[j]);
                v2.push_back(g);
                e2.push_back(g * std::sqrt(1.0 / c + 1.0 / s[i] + 1.0 / s[j]));
            }
        }
        return combine(v2, e2, 2);
    }
    if (order == 3) {
        std::vector<double> v3, e3;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                for (int k = j + 1; k < 4; ++k) {
                    double c = require(counts.triples(i, j, k), "three-fold");
                    double g = c * n * n / (s[i] * s[j] * s[k]);
                    v3.push_back(g);
                    e3.push_back(g * std::sqrt(1.0 / c + 1.0 / s[i] +
                                               1.0 / s[j] + 1.0 / s[k]));
                }
            }
        }
        return combine(v3, e3, 3);
    }
    double c4 = require(counts.quads(), "four-fold");
    double g4 = c4 * n * n * n / (s[0] * s[1] * s[2] * s[3]);
    double e4 = g4 * std::sqrt(1.0 / c4 + 1.0 / s[0] + 1.0 / s[1] + 1.0 / s[2] +
                               1.0 / s[3]);
    return {4, g4, e4};
}

std::vector<CorrelationMeasurement> estimate_correlations(
    const CoincidenceCounts& counts) {
    return {estimate_correlation(counts, 2), estimate_correlation(counts, 3),
            estimate_correlation(counts, 4)};
}

void write_record(std::ostream& os, const DetectionRecord& rec) {
    os << rec.pulse_index << ' ';
    for (int i = 0; i < kNumDetectors; ++i) os << (rec.clicks[i] ? '1' : '0');
    os << '\n';
}

DetectionRecord parse_record(const std::string& line, std::uint64_t line_no) {
    auto bad = [&](const char* why) {
        fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": " + why);
    };
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) bad("expected '<index> <bits>'");
    DetectionRecord rec;
    std::size_t pos = 0;
    try {
        rec.pulse_index = std::stoull(line.substr(0, sp), &pos);
    } catch (const std::exception&) {
        bad("pulse index is not a 64-bit natural");
    }
    if (pos != sp) bad("pulse index is not a 64-bit natural");
    if (line.size() != sp + 1 + kNumDetectors) bad("expected 4 click bits");
    for (int i = 0; i < kNumDetectors; ++i) {
        char c = line[sp + 1 + static_cast<std::size_t>(i)];
        if (c != '0' && c != '1') bad("click bits must be 0 or 1");
        rec.clicks[i] = c == '1';
    }
    return rec;
}

std::vector<DetectionRecord> read_record_file(std::istream& is) {
    std::vector<DetectionRecord> out;
    std::string line;
    std::uint64_t line_no = 0;
    std::uint64_t prev_index = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        DetectionRecord rec = parse_record(line, line_no);
        if (!out.empty() && rec.pulse_index <= prev_index) {
            fail(ErrorCode::parse, "line " + std::to_string(line_no) +
                                       ": pulse index not strictly increasing");
        }
        prev_index = rec.pulse_index;
        out.push_back(rec);
    }
    if (out.empty()) fail(ErrorCode::empty_stream, "record file contains no records");
    return out;
}

}  // namespace pnc
