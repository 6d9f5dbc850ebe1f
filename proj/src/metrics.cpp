#include "auvsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace auvsim {

namespace {

int nearest_rank(const std::vector<int>& sorted, double pct) {
    size_t n = sorted.size();
    size_t rank = static_cast<size_t>(std::ceil(pct / 100.0 * static_cast<double>(n)));
    rank = std::clamp<size_t>(rank, 1, n);
    return sorted[rank - 1];
}

}  // namespace

NstepSummary nstep_stats(const std::vector<int>& nsteps) {
    if (nsteps.empty()) throw std::logic_error("nstep_stats on an empty list");
    std::vector<int> sorted = nsteps;
    std::sort(sorted.begin(), sorted.end());
    NstepSummary s;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    s.p5 = nearest_rank(sorted, 5.0);
    s.p25 = nearest_rank(sorted, 25.0);
    s.p50 = nearest_rank(sorted, 50.0);
    s.p75 = nearest_rank(sorted, 75.0);
    s.p95 = nearest_rank(sorted, 95.0);
    return s;
}

std::vector<TrainCurvePoint> RunMetrics::train_curve(int window) const {
    std::vector<TrainCurvePoint> curve;
    if (train_nstep.empty() || window < 1) return curve;
    const size_t w = static_cast<size_t>(window);
    for (size_t end = std::min(w, train_nstep.size()); end <= train_nstep.size();
         end += w) {
        size_t begin = end >= w ? end - w : 0;
        std::vector<int> slice(train_nstep.begin() + static_cast<ptrdiff_t>(begin),
                               train_nstep.begin() + static_cast<ptrdiff_t>(end));
        NstepSummary s = nstep_stats(slice);
        curve.push_back({static_cast<int64_t>(end), s.mean, s.p25, s.p75});
    }
    return curve;
}

MetricsAccumulator::MetricsAccumulator(int n, int num_areas)
    : n_(n),
      num_areas_(num_areas),
      location_counts_(static_cast<size_t>(n) * n, 0),
      tx_mass_(static_cast<size_t>(num_areas), 0.0) {}

void MetricsAccumulator::consume(const EpisodeLog& log) {
    Coord pos = log.start;
    for (const SlotRecord& rec : log.slots) {
        location_counts_[static_cast<size_t>(pos.r - 1) * n_ + (pos.c - 1)] += 1;
        ++positions_;
        ++slots_;
        if (rec.comm_slot) {
            ++comm_slots_;
            if (rec.collision) ++collisions_;
            if (rec.delivered_area == -2) {
                ++deliveries_;
                double share = 1.0 / num_areas_;
                for (double& m : tx_mass_) m += share;
            } else if (rec.delivered_area >= 0) {
                ++deliveries_;
                tx_mass_[static_cast<size_t>(rec.delivered_area)] += 1.0;
            }
        }
        pos = rec.pos;
    }
    nsteps_.push_back(log.n_step);
}

RunMetrics MetricsAccumulator::finish() const {
    RunMetrics m;
    m.n = n_;
    m.num_areas = num_areas_;
    m.test_nstep = nsteps_;
    if (!nsteps_.empty()) m.test_summary = nstep_stats(nsteps_);
    m.location_heat.resize(location_counts_.size(), 0.0);
    if (positions_ > 0)
        for (size_t i = 0; i < location_counts_.size(); ++i)
            m.location_heat[i] =
                static_cast<double>(location_counts_[i]) / static_cast<double>(positions_);
    m.tx_heat.resize(tx_mass_.size(), 0.0);
    if (comm_slots_ > 0)
        for (size_t i = 0; i < tx_mass_.size(); ++i) m.tx_heat[i] = tx_mass_[i] / comm_slots_;
    m.comm_slots = comm_slots_;
    m.collisions = collisions_;
    m.deliveries = deliveries_;
    m.slots_simulated = slots_;
    return m;
}

}  // namespace auvsim
