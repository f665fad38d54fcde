#include "takt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace takt {

namespace {

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

int rint(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace

NetworkInstance synth_instance(const SynthSpec& s) {
    std::mt19937_64 rng(s.seed);
    NetworkInstance inst;
    inst.params.period = s.period;
    inst.params.kappa = s.kappa;
    inst.params.hw_network = s.headway;
    inst.params.hw_hub = s.hub_headway;
    inst.params.hw_sibling = s.sibling_spread;
    inst.params.min_transfer = s.min_transfer;
    inst.params.max_extra_dwell = s.max_extra_dwell;
    inst.params.alpha = s.alpha;

    int nb = std::max(2, s.branches);
    std::vector<int> len = s.branch_len;
    if (len.empty()) {
        int rest = std::max(nb, s.stations - 1);
        len.assign(nb, rest / nb);
        for (int i = 0; i < rest % nb; ++i) ++len[i];
    }
    nb = static_cast<int>(len.size());

    inst.stations.push_back({"H", true, false, -1});
    int single_branch = s.with_single_track ? nb - 1 : -1;
    std::vector<std::vector<int>> branch(nb);  // hub -> tip order, hub excluded
    for (int b = 0; b < nb; ++b) {
        for (int i = 0; i < len[b]; ++i) {
            Station st;
            st.name = std::string(1, static_cast<char>('A' + b)) + std::to_string(i + 1);
            st.single_platform = b == single_branch;
            branch[b].push_back(static_cast<int>(inst.stations.size()));
            inst.stations.push_back(st);
        }
    }

    // segments, hub -> tip per branch
    std::vector<std::vector<int>> bseg(nb);
    std::vector<int> seg_base;
    for (int b = 0; b < nb; ++b) {
        int prev = 0;
        for (int i = 0; i < len[b]; ++i) {
            TrackSegment seg;
            int cur = branch[b][i];
            seg.name = inst.stations[prev].name + "-" + inst.stations[cur].name;
            seg.station_a = prev;
            seg.station_b = cur;
            if (b == single_branch) {
                seg.kind = SegmentKind::single_track;
                seg.opposite_gap = 2;
            } else if (s.with_quad && b == 0 && i < 2 && len[0] >= 2) {
                seg.kind = SegmentKind::quadruple_track;
            } else {
                seg.kind = SegmentKind::double_track;
            }
            seg.dep_headway = 4;
            seg.arr_headway = 4;
            bseg[b].push_back(static_cast<int>(inst.segments.size()));
            seg_base.push_back(b == single_branch ? rint(rng, 6, 12) : rint(rng, 4, 10));
            inst.segments.push_back(seg);
            prev = cur;
        }
    }

    // branch pairs: (0,1),(1,2),...,(0,2),... so early lines chain around the
    // hub and the first two always share a branch
    std::vector<std::pair<int, int>> pairs;
    for (int g = 1; g < nb; ++g)
        for (int a = 0; a + g < nb; ++a) pairs.emplace_back(a, a + g);

    int express_idx = s.with_express && s.lines > 2 ? 2 : -1;
    int freq2_idx = s.with_freq2 && s.lines > 3 ? 3 : -1;
    int rush_idx = s.with_rush && s.lines > 4 ? 4 : -1;

    int next_pair = 0;
    for (int li = 0; li < s.lines; ++li) {
        auto [ba, bb] = li == express_idx
                            ? pairs[0]
                            : pairs[next_pair++ % pairs.size()];
        Line line;
        line.name = "L" + std::to_string(li + 1);
        for (int i = len[ba] - 1; i >= 0; --i) line.stations.push_back(branch[ba][i]);
        line.stations.push_back(0);
        for (int i = 0; i < len[bb]; ++i) line.stations.push_back(branch[bb][i]);
        int n = line.num_stations();
        line.stops.assign(n, 1);
        bool express = li == express_idx && single_branch != ba &&
                       single_branch != bb && n >= 5;
        if (express)
            for (int p = 1; p < n - 1; ++p)
                if (p % 2 == 0 && line.stations[p] != 0) line.stops[p] = 0;
        for (int i = len[ba] - 1; i >= 1; --i) line.segments.push_back(bseg[ba][i]);
        line.segments.push_back(bseg[ba][0]);
        for (int i = 0; i < len[bb]; ++i) line.segments.push_back(bseg[bb][i]);
        for (int d = 0; d < 2; ++d) {
            line.run[d].resize(n - 1);
            for (int k = 0; k < n - 1; ++k)
                line.run[d][k] = seg_base[line.segments[k]] + rint(rng, 0, 1);
        }
        line.min_dwell[0].resize(std::max(0, n - 2));
        for (int p = 1; p <= n - 2; ++p)
            line.min_dwell[0][p - 1] = line.stops[p] ? rint(rng, 1, 3) : 0;
        line.min_dwell[1] = line.min_dwell[0];
        if (li == freq2_idx) line.frequency = 2;
        if (li == rush_idx) {
            line.rush_hour = true;
            line.rush_direction = kOutbound;
        }
        inst.lines.push_back(std::move(line));
    }
    if (s.lines >= 2) inst.siblings.emplace_back(0, 1);

    // demand, biased toward the hub
    int S = static_cast<int>(inst.stations.size());
    std::map<std::pair<int, int>, double> dm;
    int want = std::max(1, s.od_pairs);
    for (int attempt = 0; attempt < want * 20 && static_cast<int>(dm.size()) < want;
         ++attempt) {
        int from = rint(rng, 1, S - 1);
        int to = unit(rng) < 0.5 ? 0 : rint(rng, 0, S - 1);
        if (to == from) continue;
        double d = s.demand_lo + unit(rng) * (s.demand_hi - s.demand_lo);
        d = std::max(0.1, std::round(d * 10.0) / 10.0);
        if (!od_reachable(inst, from, to)) continue;
        dm[{from, to}] += d;
    }
    for (const auto& [key, d] : dm) inst.od.push_back({key.first, key.second, d});

    if (s.representative) {
        inst.params.representative_stations.push_back(0);
        for (int b = 0; b < nb; ++b)
            inst.params.representative_stations.push_back(branch[b].back());
    }

    ValidationReport rep = validate_instance(inst);
    if (!rep.ok())
        throw std::logic_error("generator produced an invalid instance: " +
                               rep.issues.front().where + ": " +
                               rep.issues.front().what);
    return inst;
}

SynthSpec synth_preset(const std::string& name) {
    SynthSpec s;
    if (name == "tiny") {
        s.branches = 2;
        s.branch_len = {2, 2};
        s.lines = 2;
        s.period = 60;
        s.kappa = 2;
        s.headway = 4;
        s.hub_headway = 4;
        s.sibling_spread = 12;
        s.min_transfer = 6;
        s.max_extra_dwell = 4;
        s.with_quad = false;
        s.with_single_track = false;
        s.with_express = false;
        s.with_freq2 = false;
        s.with_rush = false;
        s.od_pairs = 8;
        return s;
    }
    if (name == "small") {
        s.branches = 3;
        s.branch_len = {3, 2, 2};
        s.lines = 4;
        s.with_quad = false;
        s.with_rush = false;
        s.od_pairs = 20;
        return s;
    }
    if (name == "medium") {
        s.branches = 4;
        s.branch_len = {4, 4, 3, 3};
        s.lines = 6;
        s.od_pairs = 40;
        return s;
    }
    throw std::runtime_error("unknown preset: " + name +
                             " (expected tiny, small or medium)");
}

}  // namespace takt
