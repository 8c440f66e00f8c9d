#include <sstream>

#include "tfred/conditions.hpp"

namespace tfred {

// One block per condition, then a flat key = value section for scripts.
std::string ConditionReport::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "# condition report for " << system << "\n\n";
    for (const auto& c : conditions) {
        os << "[" << c.name << "]\n";
        os << "verdict = " << verdict_name(c.verdict) << '\n';
        if (c.samples) os << "samples = " << c.samples << '\n';
        if (!c.detail.empty()) os << "detail = " << c.detail << '\n';
        if (c.witness) {
            os << "witness = (";
            for (Eigen::Index i = 0; i < c.witness->size(); ++i) os << (i ? ", " : "") << (*c.witness)[i];
            os << ")\n";
        }
        for (const auto& [k, v] : c.margins) os << "margin." << k << " = " << v << '\n';
        os << '\n';
    }
    os << "[summary]\n";
    os << "system = " << system << '\n';
    for (const auto& c : conditions) os << "condition." << c.name << " = " << verdict_name(c.verdict) << '\n';
    for (const auto& [k, v] : info) os << k << " = " << v << '\n';
    os << "passed = " << (passed() ? "yes" : "no") << '\n';
    return os.str();
}

}  // namespace tfred
