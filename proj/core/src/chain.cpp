#include "stratafill/chain.hpp"

#include <algorithm>

namespace stratafill {

double simplex_diameter(const DiscreteSimplex& s, const Metric& metric) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.verts.size(); ++i)
        for (std::size_t j = i + 1; j < s.verts.size(); ++j)
            d = std::max(d, metric(s.verts[i], s.verts[j]));
    return d;
}

double fineness(const DiscreteChain& c, const Metric& metric) {
    double f = 0.0;
    for (const auto& [s, a] : c.terms()) f = std::max(f, simplex_diameter(s, metric));
    return f;
}

double chain_diameter(const DiscreteChain& c, const Metric& metric) {
    auto pts = support(c);
    return metric.diameter(pts);
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::FINENESS_EXCEEDED: return "FINENESS_EXCEEDED";
        case ErrorCode::TARGET_TOO_FINE: return "TARGET_TOO_FINE";
        case ErrorCode::SUPPORT_OUTSIDE_ANNULUS: return "SUPPORT_OUTSIDE_ANNULUS";
        case ErrorCode::SUPPORT_OUTSIDE_BALL: return "SUPPORT_OUTSIDE_BALL";
        case ErrorCode::PACKING_FAILED: return "PACKING_FAILED";
        case ErrorCode::TOO_FAR: return "TOO_FAR";
        case ErrorCode::NO_VALID_MAP: return "NO_VALID_MAP";
        case ErrorCode::WELLDEF_FAILED: return "WELLDEF_FAILED";
        case ErrorCode::NOT_FOUND: return "NOT_FOUND";
        case ErrorCode::PRECONDITION_FAILED: return "PRECONDITION_FAILED";
        case ErrorCode::FILL_FAILED: return "FILL_FAILED";
        case ErrorCode::BAND_NOT_DISJOINT: return "BAND_NOT_DISJOINT";
        case ErrorCode::TOWER_FAILED: return "TOWER_FAILED";
        case ErrorCode::UNSUPPORTED_DIMENSION: return "UNSUPPORTED_DIMENSION";
        case ErrorCode::COMPLEX_TOO_LARGE: return "COMPLEX_TOO_LARGE";
        case ErrorCode::DIMENSION_MISMATCH: return "DIMENSION_MISMATCH";
        case ErrorCode::IO_ERROR: return "IO_ERROR";
    }
    return "UNKNOWN";
}

}  // namespace stratafill
