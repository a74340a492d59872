#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>

#include "confspace/errors.hpp"

namespace confspace::geometry {

/// Periodic cubic lattice with n^3 vertices and spacing h.
///
/// A k-cell is a base vertex plus a set of k directions, stored as a bitmask over {0, 1, 2}.
/// Cells of degree k are indexed as vertex * cells_per_vertex(k) + slot(mask).
class Lattice {
public:
    Lattice(int n, double spacing) : n_(n), h_(spacing) {
        require(n >= 1, "lattice: n must be at least 1");
        require(spacing > 0.0, "lattice: spacing must be positive");
    }

    int n() const { return n_; }
    double spacing() const { return h_; }
    double length() const { return n_ * h_; }
    double volume() const { return length() * length() * length(); }
    double cell_volume() const { return h_ * h_ * h_; }
    std::int64_t vertices() const { return std::int64_t{n_} * n_ * n_; }

    static int cells_per_vertex(int degree) {
        static constexpr std::array<int, 4> c{1, 3, 3, 1};
        require(degree >= 0 && degree <= 3, "lattice: degree must lie in [0, 3]");
        return c[static_cast<std::size_t>(degree)];
    }

    std::int64_t cells(int degree) const { return vertices() * cells_per_vertex(degree); }

    /// Slot of a direction mask among cells of its degree: edges by direction, faces (01, 02, 12).
    static int slot(unsigned mask) {
        switch (mask) {
        case 0b000: return 0;
        case 0b001: return 0;
        case 0b010: return 1;
        case 0b100: return 2;
        case 0b011: return 0;
        case 0b101: return 1;
        case 0b110: return 2;
        case 0b111: return 0;
        default: throw DomainError("lattice: invalid direction mask");
        }
    }

    static unsigned mask_of(int degree, int slot_index) {
        static constexpr std::array<std::array<unsigned, 3>, 4> m{
            {{0b000, 0, 0}, {0b001, 0b010, 0b100}, {0b011, 0b101, 0b110}, {0b111, 0, 0}}};
        require(slot_index >= 0 && slot_index < cells_per_vertex(degree), "lattice: slot out of range");
        return m[static_cast<std::size_t>(degree)][static_cast<std::size_t>(slot_index)];
    }

    std::array<int, 3> coords(std::int64_t v) const {
        const int x = static_cast<int>(v % n_);
        const int y = static_cast<int>((v / n_) % n_);
        const int z = static_cast<int>(v / (std::int64_t{n_} * n_));
        return {x, y, z};
    }

    std::int64_t vertex(int x, int y, int z) const {
        auto w = [this](int c) { return ((c % n_) + n_) % n_; };
        return w(x) + std::int64_t{n_} * (w(y) + std::int64_t{n_} * w(z));
    }

    std::int64_t shift(std::int64_t v, int dir, int steps = 1) const {
        auto c = coords(v);
        c[static_cast<std::size_t>(dir)] += steps;
        return vertex(c[0], c[1], c[2]);
    }

    /// v + sum of unit vectors in mask.
    std::int64_t shift_mask(std::int64_t v, unsigned mask) const {
        for (int d = 0; d < 3; ++d)
            if (mask & (1u << d)) v = shift(v, d);
        return v;
    }

    std::int64_t cell(std::int64_t v, unsigned mask) const {
        return v * cells_per_vertex(std::popcount(mask)) + slot(mask);
    }

    bool operator==(const Lattice& o) const { return n_ == o.n_ && h_ == o.h_; }

private:
    int n_;
    double h_;
};

} // namespace confspace::geometry
