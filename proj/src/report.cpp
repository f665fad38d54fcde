#include "takt/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "takt/periodic.hpp"

namespace takt {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
                          "#7f7f7f", "#bcbd22"};

std::string min_label(int instants) {
    if (instants % 2 == 0) return std::to_string(instants / 2);
    return std::to_string(instants / 2) + ".5";
}

}  // namespace

std::vector<int> default_corridor(const NetworkInstance& inst) {
    int best = -1, n = 0;
    for (size_t l = 0; l < inst.lines.size(); ++l)
        if (inst.lines[l].num_stations() > n) {
            n = inst.lines[l].num_stations();
            best = static_cast<int>(l);
        }
    if (best < 0) return {};
    return inst.lines[best].stations;
}

std::string corridor_svg(const NetworkInstance& inst, const TimetableSolution& sol,
                         const std::vector<int>& corridor) {
    const int T = inst.params.period;
    const double left = 90, top = 30, right = 30, bottom = 45;
    const double plot_w = 860, row_h = 46;
    double plot_h = row_h * std::max<size_t>(1, corridor.size() - 1);
    double W = left + plot_w + right, H = top + plot_h + bottom;

    std::vector<int> pos(inst.stations.size(), -1);
    for (size_t i = 0; i < corridor.size(); ++i)
        if (pos[corridor[i]] < 0) pos[corridor[i]] = static_cast<int>(i);

    auto X = [&](double t) { return left + plot_w * t / T; };
    auto Y = [&](double p) { return top + row_h * p; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    // grid: horizontal station lines, vertical lines every 10 minutes
    os << "<g stroke=\"#ddd\" stroke-width=\"1\">\n";
    for (size_t i = 0; i < corridor.size(); ++i)
        os << "<line x1=\"" << left << "\" y1=\"" << Y(i) << "\" x2=\""
           << left + plot_w << "\" y2=\"" << Y(i) << "\"/>\n";
    for (int m = 0; m <= T; m += 20)
        os << "<line x1=\"" << X(m) << "\" y1=\"" << top << "\" x2=\"" << X(m)
           << "\" y2=\"" << top + plot_h << "\"/>\n";
    os << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (size_t i = 0; i < corridor.size(); ++i)
        os << "<text x=\"" << left - 8 << "\" y=\"" << Y(i) + 4
           << "\" text-anchor=\"end\">" << inst.stations[corridor[i]].name
           << "</text>\n";
    for (int m = 0; m <= T; m += 20)
        os << "<text x=\"" << X(m) << "\" y=\"" << top + plot_h + 18
           << "\" text-anchor=\"middle\">" << min_label(m) << "</text>\n";
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << H - 8
       << "\" text-anchor=\"middle\">time [min]</text>\n";
    os << "</g>\n";

    // trains: consecutive corridor visits become line segments; a segment
    // that crosses the period wraps around and is drawn in two pieces
    for (const TrainPath& tp : sol.trains) {
        const char* color = kPalette[tp.line % 10];
        const char* dash = tp.direction == kInbound ? "6,3" : "";
        double width = tp.dup == 0 ? 1.8 : 1.2;
        os << "<g stroke=\"" << color << "\" stroke-width=\"" << width
           << "\" fill=\"none\"";
        if (*dash) os << " stroke-dasharray=\"" << dash << "\"";
        os << ">\n";
        auto draw = [&](int t1, double p1, int t2, double p2) {
            int dt = cyc_delta(t1, t2, T);
            if (dt == 0 && p1 == p2) return;
            if (t1 + dt <= T) {
                os << "<line x1=\"" << X(t1) << "\" y1=\"" << Y(p1) << "\" x2=\""
                   << X(t1 + dt) << "\" y2=\"" << Y(p2) << "\"/>\n";
                return;
            }
            double frac = dt > 0 ? static_cast<double>(T - t1) / dt : 0.0;
            double pm = p1 + (p2 - p1) * frac;
            os << "<line x1=\"" << X(t1) << "\" y1=\"" << Y(p1) << "\" x2=\""
               << X(T) << "\" y2=\"" << Y(pm) << "\"/>\n";
            os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(pm) << "\" x2=\""
               << X(t1 + dt - T) << "\" y2=\"" << Y(p2) << "\"/>\n";
        };
        const auto& vs = tp.visits;
        for (size_t v = 0; v < vs.size(); ++v) {
            int p = pos[vs[v].station];
            if (p < 0) continue;
            if (vs[v].arr != vs[v].dep) draw(vs[v].arr, p, vs[v].dep, p);
            if (v + 1 < vs.size()) {
                int q = pos[vs[v + 1].station];
                if (q >= 0) draw(vs[v].dep, p, vs[v + 1].arr, q);
            }
        }
        os << "</g>\n";
    }

    // legend
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    double lx = left;
    for (size_t l = 0; l < inst.lines.size(); ++l) {
        os << "<line x1=\"" << lx << "\" y1=\"" << 14 << "\" x2=\"" << lx + 24
           << "\" y2=\"" << 14 << "\" stroke=\"" << kPalette[l % 10]
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << lx + 28 << "\" y=\"" << 18 << "\" fill=\"#333\">"
           << inst.lines[l].name << "</text>\n";
        lx += 40 + 9.0 * inst.lines[l].name.size();
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string transfer_csv(const NetworkInstance& inst,
                         const std::vector<double>& per_commodity,
                         const std::vector<CommodityRoute>& routes) {
    std::ostringstream os;
    os << "commodity,from,to,demand,minutes,transfers,route\n";
    for (size_t k = 0; k < inst.od.size(); ++k) {
        const ODEntry& e = inst.od[k];
        os << k << ',' << inst.stations[e.from].name << ','
           << inst.stations[e.to].name << ',' << e.demand << ',';
        if (k < per_commodity.size() && std::isfinite(per_commodity[k]))
            os << per_commodity[k] / 2.0;
        else
            os << "unreachable";
        const CommodityRoute* r = nullptr;
        for (const auto& cr : routes)
            if (cr.commodity == static_cast<int>(k)) r = &cr;
        int transfers = r && !r->legs.empty() ? static_cast<int>(r->legs.size()) - 1 : 0;
        os << ',' << transfers << ',';
        if (r)
            for (size_t i = 0; i < r->legs.size(); ++i) {
                const RouteLeg& leg = r->legs[i];
                if (i) os << " > ";
                os << inst.lines[leg.line].name << ' '
                   << inst.stations[leg.board_station].name << '@'
                   << leg.board_t / 2.0 << "->"
                   << inst.stations[leg.alight_station].name << '@'
                   << leg.alight_t / 2.0;
            }
        os << '\n';
    }
    return os.str();
}

}  // namespace takt
