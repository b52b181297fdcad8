// SPDX-License-Identifier: Apache-2.0
#include "phicsl/harness.hpp"

#include <algorithm>
#include <sstream>

namespace phicsl {

PhiReport phi_report(const StateVector& state) {
    PhiReport report;
    std::string note;
    enumerate_grains(state.layout(), &note);
    for (const auto& r : phi_per_grain(state)) {
        report.grains.push_back({r.grain.to_string(), r.bipartition.to_string(r.grain), r.phi});
    }
    const PhiResult best = phi_max(state);
    if (best.grain.blocks.empty()) {
        report.note = note;
        report.max = {"-", "-", 0.0};
    } else {
        report.max = {best.grain.to_string(), best.bipartition.to_string(best.grain), best.phi};
    }
    return report;
}

std::string PhiReport::to_csv() const {
    std::string out = "kind,grain,bipartition,phi\n";
    for (const auto& r : grains) out += "grain," + r.grain + "," + r.bipartition + "," + format_number(r.phi) + "\n";
    out += "max," + max.grain + "," + max.bipartition + "," + format_number(max.phi) + "\n";
    return out;
}

std::string PhiReport::to_text() const {
    std::size_t wg = 5, wb = 11;
    for (const auto& r : grains) {
        wg = std::max(wg, r.grain.size());
        wb = std::max(wb, r.bipartition.size());
    }
    wg = std::max(wg, max.grain.size());
    wb = std::max(wb, max.bipartition.size());
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };

    std::ostringstream os;
    os << pad("grain", wg) << "  " << pad("min cut", wb) << "  phi\n";
    for (const auto& r : grains) os << pad(r.grain, wg) << "  " << pad(r.bipartition, wb) << "  " << format_number(r.phi) << "\n";
    os << "Phi^Max = " << format_number(max.phi) << " at grain " << max.grain << " cut " << max.bipartition << "\n";
    if (!note.empty()) os << "note: " << note << "\n";
    return os.str();
}

}  // namespace phicsl
