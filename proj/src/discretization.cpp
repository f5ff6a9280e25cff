#include "rbvix/discretization.hpp"

namespace rbvix {

std::string to_string(SchemeKind kind) { return kind == SchemeKind::Rectangle ? "rect" : "trap"; }

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "rect" || name == "rectangle") return SchemeKind::Rectangle;
    if (name == "trap" || name == "trapezoid") return SchemeKind::Trapezoid;
    throw UsageError("scheme: expected 'rect' or 'trap', got '" + name + "'");
}

double vix_from_vix2(double vix2) {
    if (!(vix2 >= 0.0)) throw UsageError("vix_from_vix2: VIX^2 must be >= 0");
    return std::sqrt(vix2);
}

}  // namespace rbvix
