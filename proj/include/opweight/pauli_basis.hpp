#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opweight {

/// Local operator frame of a vectorised operator. `pauli` is {1, x, y, z};
/// `parallel` is {1, ∥, ⊥1, ⊥2} of some ParallelBasis.
enum class Frame : std::uint32_t { pauli = 0, parallel = 1 };

/// Non-identity single-site Pauli matrices.
enum class PauliLabel : std::uint8_t { x = 1, y = 2, z = 3 };

PauliLabel parse_pauli_label(const std::string& text);
char to_char(PauliLabel label);

struct BlochAngles {
    double theta = 0.0;  // [0, π]
    double phi = 0.0;    // [0, 2π)

    static BlochAngles from_degrees(double theta_deg, double phi_deg);
    double theta_degrees() const;
    double phi_degrees() const;
};

using Vec3 = std::array<double, 3>;

/// Orthonormal triple adapted to the product state |θ,φ⟩. Components are
/// coefficients over (σ^x, σ^y, σ^z).
///
/// perp1 is the ∂/∂θ direction and perp2 the ∂/∂φ direction, so that
/// (perp1, perp2, parallel) is right handed. At the poles the φ-independent
/// choice perp1 = (1,0,0), perp2 = (0,±1,0) is used.
struct ParallelBasis {
    BlochAngles angles;
    Vec3 parallel{};
    Vec3 perp1{};
    Vec3 perp2{};
};

ParallelBasis parallel_basis(BlochAngles angles);

/// 4×4 orthogonal map taking site components in the {1,x,y,z} frame to the
/// {1,∥,⊥1,⊥2} frame. Block diagonal: 1 ⊕ (rows parallel, perp1, perp2).
Eigen::Matrix4d frame_rotation(const ParallelBasis& basis);

struct PauliString {
    std::vector<std::uint8_t> labels;  // 0..3 in the declared frame
    Frame frame = Frame::pauli;
};

struct WeightSplit {
    std::size_t total = 0;
    std::size_t parallel_weight = 0;
    std::size_t orthogonal_weight = 0;

    bool operator==(const WeightSplit&) const = default;
};

/// Counts non-identity insertions, split into parallel and orthogonal ones.
/// A Pauli-frame label is accepted only if its direction is exactly parallel or
/// exactly orthogonal to the basis direction.
WeightSplit weight_split(const PauliString& s, const ParallelBasis& basis);

}  // namespace opweight
