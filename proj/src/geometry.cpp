#include "cusp/geometry.hpp"

#include <cmath>
#include <string>

namespace cusp {

void DiskGeometry::validate() const {
    if (!(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(r1) || !std::isfinite(r2))
        throw ConfigError("disk radii must be finite and positive");
}

const char* to_string(RegionTag t) {
    switch (t) {
        case RegionTag::Inclusion1: return "Inclusion1";
        case RegionTag::Inclusion2: return "Inclusion2";
        case RegionTag::Matrix: return "Matrix";
        case RegionTag::Interface1: return "Interface1";
        case RegionTag::Interface2: return "Interface2";
    }
    return "?";
}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Inclusion1: return "Inclusion1";
        case Phase::Inclusion2: return "Inclusion2";
        case Phase::Matrix: return "Matrix";
    }
    return "?";
}

cplx theta(cplx z) {
    if (std::abs(z) <= kPoleTol) throw DomainError("theta: point at the origin (pole of the map)");
    return cplx(0.0, 1.0) / z;
}

Point theta(Point p) {
    const double n = p.x1 * p.x1 + p.x2 * p.x2;
    if (std::sqrt(n) <= kPoleTol) throw DomainError("theta: point at the origin (pole of the map)");
    return {p.x2 / n, p.x1 / n};
}

cplx map_xk(cplx z, double k) {
    if (k == 0.0) return z;
    if (std::abs(z) <= kPoleTol) throw DomainError("map_xk: point at the origin");
    const cplx den = cplx(0.0, 1.0) + k * z;
    if (std::abs(den) <= kPoleTol * std::max(1.0, std::abs(k)))
        throw DomainError("map_xk: pole hit");
    return cplx(0.0, 1.0) * z / den;
}

Point map_xk(Point p, int k) { return Point::from(map_xk(p.z(), static_cast<double>(k))); }

XkJet map_xk_jet(Point p, int k) {
    const cplx z = p.z();
    const cplx val = map_xk(z, k);
    const cplx den = cplx(0.0, 1.0) + static_cast<double>(k) * z;
    return {Point::from(val), -1.0 / (den * den)};
}

Region classify(Point p, const DiskGeometry& geo, double band) {
    const double d1 = std::hypot(p.x1, p.x2 - geo.r1) - geo.r1;
    const double d2 = std::hypot(p.x1, p.x2 + geo.r2) - geo.r2;
    if (std::abs(d1) <= band) return {RegionTag::Interface1, band};
    if (std::abs(d2) <= band) return {RegionTag::Interface2, band};
    if (d1 < 0) return {RegionTag::Inclusion1, band};
    if (d2 < 0) return {RegionTag::Inclusion2, band};
    return {RegionTag::Matrix, band};
}

static Phase phase_of(const Region& r, std::optional<Phase> hint, const char* who) {
    switch (r.tag) {
        case RegionTag::Inclusion1: return Phase::Inclusion1;
        case RegionTag::Inclusion2: return Phase::Inclusion2;
        case RegionTag::Matrix: return Phase::Matrix;
        default:
            if (hint) return *hint;
            throw DomainError(std::string(who) + ": point on an interface; a region hint is required");
    }
}

Phase resolve_phase(Point p, std::optional<Phase> hint, const DiskGeometry& geo, double band) {
    // an explicit hint selects the branch formula (one-sided limits, analytic continuation)
    if (hint) return *hint;
    return phase_of(classify(p, geo, band), hint, "resolve_phase");
}

Region classify_strip(Point p, double band) {
    if (std::abs(p.x1 - 0.5) <= band) return {RegionTag::Interface1, band};
    if (std::abs(p.x1 + 0.5) <= band) return {RegionTag::Interface2, band};
    if (p.x1 > 0.5) return {RegionTag::Inclusion1, band};
    if (p.x1 < -0.5) return {RegionTag::Inclusion2, band};
    return {RegionTag::Matrix, band};
}

Phase resolve_strip_phase(Point p, std::optional<Phase> hint, double band) {
    if (hint) return *hint;
    return phase_of(classify_strip(p, band), hint, "resolve_strip_phase");
}

Circle invert_circle(const Circle& c, cplx z0) {
    const cplx d = c.c - z0;
    const double den = std::norm(d) - c.r * c.r;
    if (std::abs(den) <= kPoleTol) throw DomainError("invert_circle: pole on the circle");
    return {std::conj(d) / den, c.r / std::abs(den)};
}

cplx MobiusMap::forward(cplx z) const {
    if (affine) return z / scale;
    if (std::abs(z - pole) <= kPoleTol) throw DomainError("MobiusMap: point at the pole");
    return mu / (z - pole) + shift;
}

cplx MobiusMap::inverse(cplx w) const {
    if (affine) return w * scale;
    const cplx d = w - shift;
    if (std::abs(d) <= kPoleTol) throw DomainError("MobiusMap: inverse at the image of infinity");
    return pole + mu / d;
}

cplx MobiusMap::deriv(cplx z) const {
    if (affine) return 1.0 / scale;
    const cplx d = z - pole;
    return -mu / (d * d);
}

Circle MobiusMap::image(const Circle& c) const {
    if (affine) return {c.c / scale, c.r / scale};
    Circle raw = invert_circle(c, pole);
    return {mu * raw.c + shift, raw.r * std::abs(mu)};
}

MobiusMap equal_radius_map(const DiskGeometry& geo, double exclusion_radius) {
    geo.validate();
    MobiusMap m;
    if (geo.r1 == geo.r2) {
        m.affine = true;
        m.scale = geo.r1;
        return m;
    }
    const double r1 = geo.r1, r2 = geo.r2;
    m.affine = false;
    m.q_rhs = 4.0 * r1 * r2 / (r2 - r1);
    const double Q = m.q_rhs;
    // Equal image radii r1/(|z0|² - 2 r1 z2) = r2/(|z0|² + 2 r2 z2) is the circle
    // |z0|² = 2 c z2 with c = 2 r1 r2/(r2 - r1); the direction z1/z2 = t fixes the point on it.
    const double c = 2.0 * r1 * r2 / (r2 - r1);
    std::vector<double> candidates;
    if (std::abs(Q) > 2.0) {
        const double s = std::sqrt(Q * Q - 4.0);
        m.roots = {(Q + s) / 2.0, (Q - s) / 2.0};
        if (std::abs(m.roots[1]) > std::abs(m.roots[0])) std::swap(m.roots[0], m.roots[1]);
        candidates = m.roots;
    }
    candidates.push_back(0.0);  // pole on the symmetry axis: farthest point of the locus
    bool found = false;
    for (double t : candidates) {
        const cplx z0(2.0 * c * t / (1.0 + t * t), 2.0 * c / (1.0 + t * t));
        if (std::abs(z0) >= exclusion_radius + 1.0) {
            m.pole = z0;
            m.root_t = t;
            found = true;
            break;
        }
    }
    if (!found)
        throw ConfigError("equal_radius_map: no admissible pole outside the exclusion region");
    const Circle i1 = invert_circle({cplx(0.0, r1), r1}, m.pole);
    const Circle i2 = invert_circle({cplx(0.0, -r2), r2}, m.pole);
    m.image_radius1 = i1.r;
    m.image_radius2 = i2.r;
    const cplx wt = -1.0 / m.pole;  // image of the tangency point
    m.mu = cplx(0.0, 1.0) / (i1.c - wt);
    m.shift = -m.mu * wt;
    return m;
}

}  // namespace cusp
