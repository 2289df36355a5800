#pragma once

#include <optional>
#include <vector>

#include "cusp/common.hpp"

namespace cusp {

struct DiskGeometry {
    double r1 = 1.0;  // upper disk centered (0, r1)
    double r2 = 1.0;  // lower disk centered (0, -r2)
    void validate() const;
};

enum class RegionTag { Inclusion1, Inclusion2, Matrix, Interface1, Interface2 };

// The three open phases; branch formulas dispatch on these.
enum class Phase { Inclusion1 = 0, Inclusion2 = 1, Matrix = 2 };

struct Region {
    RegionTag tag = RegionTag::Matrix;
    double band = 1e-9;
    bool on_interface() const {
        return tag == RegionTag::Interface1 || tag == RegionTag::Interface2;
    }
};

inline constexpr double kDefaultBand = 1e-9;
inline constexpr double kPoleTol = 1e-12;

const char* to_string(RegionTag t);
const char* to_string(Phase p);

struct Circle {
    cplx c;
    double r = 1.0;
};

// Θ(x) = (x2, x1)/|x|², i.e. z ↦ i/z.
Point theta(Point p);
cplx theta(cplx z);

// X_k(x) = Θ(Θ(x) + (k, 0)) = iz/(i + kz).
Point map_xk(Point p, int k);
cplx map_xk(cplx z, double k);

struct XkJet {
    Point value;
    cplx deriv;  // dX_k/dz
};
XkJet map_xk_jet(Point p, int k);

Region classify(Point p, const DiskGeometry& geo = {}, double band = kDefaultBand);

// Phase of p, or hint when p lies within band of an interface. Throws DomainError
// if p is on an interface and no hint was supplied.
Phase resolve_phase(Point p, std::optional<Phase> hint, const DiskGeometry& geo = {},
                    double band = kDefaultBand);

// Strip picture: x1 > 1/2 corresponds to Inclusion1, x1 < -1/2 to Inclusion2.
Region classify_strip(Point p, double band = kDefaultBand);
Phase resolve_strip_phase(Point p, std::optional<Phase> hint, double band = kDefaultBand);

// Möbius normalization sending the disks B_{r1}(0,r1), B_{r2}(0,-r2) to the
// canonical pair B_1(0,1), B_1(0,-1):  F(z) = mu/(z - z0) + shift, or F(z) = z/r for equal radii.
struct MobiusMap {
    bool affine = true;  // equal radii: pure scaling
    double scale = 1.0;  // used when affine
    cplx pole{0.0, 0.0};
    cplx mu{1.0, 0.0};
    cplx shift{0.0, 0.0};
    double root_t = 0.0;              // root of t + 1/t = Q used for the pole direction
    std::vector<double> roots;        // both roots of t + 1/t = Q
    double q_rhs = 0.0;               // Q = 4 r1 r2/(r2 - r1)
    double image_radius1 = 1.0, image_radius2 = 1.0;  // before final scaling

    cplx forward(cplx z) const;
    cplx inverse(cplx w) const;
    cplx deriv(cplx z) const;  // dF/dz
    Circle image(const Circle& c) const;
};

// Pole is chosen outside the centered disk of radius exclusion_radius (plus a unit margin).
MobiusMap equal_radius_map(const DiskGeometry& geo, double exclusion_radius);

// Image of the circle |z - c| = r under z ↦ 1/(z - z0) (requires the pole off the circle).
Circle invert_circle(const Circle& c, cplx z0);

}  // namespace cusp
