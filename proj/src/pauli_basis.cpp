#include "opweight/pauli_basis.hpp"

#include <cmath>
#include <numbers>

#include "opweight/error.hpp"

namespace opweight {

PauliLabel parse_pauli_label(const std::string& text) {
    if (text == "x" || text == "X") return PauliLabel::x;
    if (text == "y" || text == "Y") return PauliLabel::y;
    if (text == "z" || text == "Z") return PauliLabel::z;
    throw invalid_input("unknown Pauli label '" + text + "' (expected x, y or z)");
}

char to_char(PauliLabel label) {
    switch (label) {
        case PauliLabel::x: return 'x';
        case PauliLabel::y: return 'y';
        case PauliLabel::z: return 'z';
    }
    return '?';
}

BlochAngles BlochAngles::from_degrees(double theta_deg, double phi_deg) {
    constexpr double deg = std::numbers::pi / 180.0;
    return {theta_deg * deg, phi_deg * deg};
}

double BlochAngles::theta_degrees() const { return theta * 180.0 / std::numbers::pi; }
double BlochAngles::phi_degrees() const { return phi * 180.0 / std::numbers::pi; }

ParallelBasis parallel_basis(BlochAngles angles) {
    const double st = std::sin(angles.theta);
    const double ct = std::cos(angles.theta);
    const double sp = std::sin(angles.phi);
    const double cp = std::cos(angles.phi);

    ParallelBasis b;
    b.angles = angles;
    b.parallel = {st * cp, st * sp, ct};
    if (std::abs(st) < 1e-12) {
        // Poles: pin the pair so it does not depend on φ.
        const double sign = ct > 0.0 ? 1.0 : -1.0;
        b.perp1 = {1.0, 0.0, 0.0};
        b.perp2 = {0.0, sign, 0.0};
    } else {
        b.perp1 = {ct * cp, ct * sp, -st};
        b.perp2 = {-sp, cp, 0.0};
    }
    return b;
}

Eigen::Matrix4d frame_rotation(const ParallelBasis& basis) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    r(0, 0) = 1.0;
    for (int k = 0; k < 3; ++k) {
        r(1, k + 1) = basis.parallel[k];
        r(2, k + 1) = basis.perp1[k];
        r(3, k + 1) = basis.perp2[k];
    }
    return r;
}

WeightSplit weight_split(const PauliString& s, const ParallelBasis& basis) {
    WeightSplit w;
    for (std::uint8_t label : s.labels) {
        if (label > 3) throw invalid_input("weight_split: label out of range");
        if (label == 0) continue;
        ++w.total;
        if (s.frame == Frame::parallel) {
            if (label == 1) ++w.parallel_weight;
            else ++w.orthogonal_weight;
            continue;
        }
        const double overlap = basis.parallel[label - 1];
        if (std::abs(std::abs(overlap) - 1.0) < 1e-12) {
            ++w.parallel_weight;
        } else if (std::abs(overlap) < 1e-12) {
            ++w.orthogonal_weight;
        } else {
            throw invalid_input("weight_split: Pauli-frame label is neither parallel nor orthogonal to the basis");
        }
    }
    return w;
}

}  // namespace opweight
